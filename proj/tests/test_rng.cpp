#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "infocycle/rng.hpp"

using namespace infocycle::rng;

TEST_CASE("streams are deterministic", "[rng]") {
  Stream a(42, Purpose::events, {3, 7}), b(42, Purpose::events, {3, 7});
  for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());
  CHECK(uniform_at(1, Purpose::agents, {5}) == uniform_at(1, Purpose::agents, {5}));
}

TEST_CASE("keys separate streams", "[rng]") {
  Stream base(42, Purpose::events, {3, 7});
  Stream other_seed(43, Purpose::events, {3, 7});
  Stream other_purpose(42, Purpose::noise, {3, 7});
  Stream other_part(42, Purpose::events, {3, 8});
  Stream swapped(42, Purpose::events, {7, 3});
  int same = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto x = base.next_u64();
    same += x == other_seed.next_u64();
    same += x == other_purpose.next_u64();
    same += x == other_part.next_u64();
    same += x == swapped.next_u64();
  }
  CHECK(same == 0);
}

TEST_CASE("uniform and normal moments", "[rng][property]") {
  Stream s(7, Purpose::synthetic);
  const int n = 200000;
  double su = 0, su2 = 0, sn = 0, sn2 = 0, se = 0;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    su += u;
    su2 += u * u;
    const double z = s.normal();
    sn += z;
    sn2 += z * z;
    se += s.exponential();
  }
  CHECK(std::abs(su / n - 0.5) < 0.005);
  CHECK(std::abs(su2 / n - 1.0 / 3.0) < 0.005);
  CHECK(std::abs(sn / n) < 0.01);
  CHECK(std::abs(sn2 / n - 1.0) < 0.02);
  CHECK(std::abs(se / n - 1.0) < 0.01);
  CHECK(to_unit(~0ULL) < 1.0);
  CHECK(to_unit(0) == 0.0);
}
