// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "infocycle/cli.hpp"
#include "infocycle/demos.hpp"

using namespace infocycle;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances and thresholds.
constexpr double kRoundedTol = 5e-3;
constexpr double kClosedTol = 1e-9;
constexpr double kGibbsSlack = 1e-12;
constexpr double kGibbsEqual = 1e-9;
constexpr double kChannelTol = 1e-6;
constexpr double kFastSeconds = 1.0;
constexpr double kEfficientShare = 0.01;  // of the jump
constexpr double kEfficientSeconds = 10.0;
constexpr double kMomentumShare = 0.90;
constexpr double kMomentumSeconds = 60.0;
constexpr double kSignShare = 0.70;
constexpr int kSeeds = 20;
constexpr int kEfficientSeeds = 5;
constexpr std::int64_t kCrossoverHorizon = 100;
constexpr double kAnnouncementMultiple = 5.0;
constexpr double kPostReturnShare = 0.10;  // of the jump

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool near(double x, double y, double tol) { return std::abs(x - y) <= tol; }

// Brute force over the joint table: sum p(i,j) log(p(i,j) / (p(i) p(j))).
double oracle_mutual(const std::vector<std::vector<double>>& j) {
  std::vector<double> px(j.size(), 0.0), py(j[0].size(), 0.0);
  for (std::size_t a = 0; a < j.size(); ++a)
    for (std::size_t b = 0; b < j[a].size(); ++b) {
      px[a] += j[a][b];
      py[b] += j[a][b];
    }
  double r = 0.0;
  for (std::size_t a = 0; a < j.size(); ++a)
    for (std::size_t b = 0; b < j[a].size(); ++b)
      if (j[a][b] > 0) r += j[a][b] * std::log(j[a][b] / (px[a] * py[b]));
  return r;
}

// ---------------------------------------------------------------------------

Verdict c1_paper_numbers() {
  const auto t0 = Clock::now();
  const double h = entropy(Distribution({0.9, 0.1}));
  const double ce1 = cross_entropy(Distribution({0.9, 0.1}), Distribution({0.5, 0.5}));
  const double ce2 = cross_entropy(Distribution({0.1, 0.9}), Distribution({0.9, 0.1}));
  const double h_closed = -0.9 * std::log(0.9) - 0.1 * std::log(0.1);
  const double ce1_closed = std::log(2.0);
  const double ce2_closed = -0.1 * std::log(0.9) - 0.9 * std::log(0.1);
  const double dt = seconds_since(t0);
  const bool ok = near(h, 0.33, kRoundedTol) && near(ce1, 0.69, kRoundedTol) &&
                  near(ce2, 2.08, kRoundedTol) && near(h, h_closed, kClosedTol) &&
                  near(ce1, ce1_closed, kClosedTol) && near(ce2, ce2_closed, kClosedTol) &&
                  dt < kFastSeconds;
  return {ok, fmt("H=%.6f CE=%.6f CE=%.6f (%.3f s)", h, ce1, ce2, dt)};
}

Verdict c2_gibbs() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<std::size_t> size(2, 16);
  std::exponential_distribution<double> ex(1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  // p may have zero cells; q is strictly positive unless it is a copy of p.
  const auto draw = [&](std::size_t n, double zero_prob) {
    std::vector<double> v(n);
    double s = 0.0;
    for (auto& x : v) s += (x = u(rng) < zero_prob ? 0.0 : ex(rng));
    if (s == 0.0) v[0] = s = 1.0;
    for (auto& x : v) x /= s;
    return v;
  };
  int violations = 0, equal_pairs = 0, skipped = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = size(rng);
    const auto pv = draw(n, 0.1);
    auto qv = i % 5 == 0 ? pv : draw(n, 0.0);
    const Distribution p(pv), q(qv);
    double ce;
    try {
      ce = cross_entropy(p, q);
    } catch (const InfiniteDivergence&) {
      ++skipped;  // q = 0 where p > 0: divergence is +inf, the inequality holds trivially
      continue;
    }
    const double h = entropy(p);
    double diff = 0.0;
    for (std::size_t k = 0; k < n; ++k) diff = std::max(diff, std::abs(p[k] - q[k]));
    const bool same = diff <= kGibbsEqual;
    equal_pairs += same;
    if (ce < h - kGibbsSlack) ++violations;
    if ((std::abs(ce - h) <= kGibbsEqual) != same) ++violations;
  }
  const double dt = seconds_since(t0);
  return {violations == 0 && dt < kFastSeconds,
          fmt("1000 pairs, %d violations, %d equal, %d infinite (%.3f s)", violations, equal_pairs,
              skipped, dt)};
}

Verdict c3_channels() {
  const std::vector<std::vector<double>> ind{{0.12, 0.08}, {0.48, 0.32}};
  const std::vector<std::vector<double>> diag{{0.3, 0.0}, {0.0, 0.7}};
  const std::vector<std::vector<double>> bsc75{{0.375, 0.125}, {0.125, 0.375}};
  const double r_ind = received_information(JointDistribution::from_rows(ind));
  const double r_diag = received_information(JointDistribution::from_rows(diag));
  const double h_diag = -0.3 * std::log(0.3) - 0.7 * std::log(0.7);
  const double r_bsc = bsc_received_information(Fidelity(0.75));
  const double r_bsc_joint = received_information(joint_from_channel(bsc(Fidelity(0.75))));
  const bool ok = near(r_ind, 0.0, kChannelTol) && near(oracle_mutual(ind), r_ind, kChannelTol) &&
                  near(r_diag, h_diag, kChannelTol) && near(oracle_mutual(diag), r_diag, kChannelTol) &&
                  near(r_bsc, 0.130812, kChannelTol) && near(r_bsc, oracle_mutual(bsc75), kChannelTol) &&
                  near(r_bsc_joint, r_bsc, kClosedTol);
  return {ok, fmt("R(ind)=%.2e R(diag)-H=%.2e R(bsc .75)=%.6f oracle %.6f", r_ind, r_diag - h_diag,
                  r_bsc, oracle_mutual(bsc75))};
}

Verdict c4_info_value() {
  const double v1 = info_value(InformedFraction(1.0));
  bool decreasing = true;
  double prev = INFINITY;
  for (int i = 1; i <= 100; ++i) {
    const double v = info_value(InformedFraction(i / 100.0));
    decreasing &= v < prev;
    prev = v;
  }
  return {v1 == 0.0 && decreasing,
          fmt("info_value(1)=%g, strictly decreasing on 100 points: %s", v1, decreasing ? "yes" : "no")};
}

Verdict c5_kahneman() {
  const auto t0 = Clock::now();
  const auto d = demos::kahneman_demo(30.0);
  const auto& gain = d.problems[0];
  const auto& loss = d.problems[1];
  bool ok = gain.options[gain.chosen].name == "B" && loss.options[loss.chosen].name == "C";
  std::mt19937_64 rng(515);
  std::uniform_real_distribution<double> logscale(std::log(1e-3), std::log(1e3));
  int stable = 0;
  for (int i = 0; i < 10; ++i) {
    const double s = std::exp(logscale(rng));
    bool same = true;
    for (const auto& p : d.problems) {
      std::vector<Lottery> scaled;
      for (const auto& o : p.options) scaled.push_back(o.lottery.scaled(s));
      same &= survival_choice(scaled, d.threshold_days * s) == p.chosen;
    }
    stable += same;
  }
  const double dt = seconds_since(t0);
  ok = ok && stable == 10 && dt < kFastSeconds;
  return {ok, fmt("gain frame %s, loss frame %s, stable under %d/10 rescalings (%.3f s)",
                  gain.options[gain.chosen].name.c_str(), loss.options[loss.chosen].name.c_str(),
                  stable, dt)};
}

Verdict c6_efficient_limit() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  std::size_t checked = 0, failed = 0;
  for (int seed = 1; seed <= kEfficientSeeds; ++seed) {
    MarketConfig c;
    c.n_momentum = 0;
    c.t_diff = 1;
    c.budget_share = 1.0;  // every newswatcher buys a perfect channel
    c.wealth_dispersion = 0.0;
    c.value_erosion = 0.0;
    c.seed = static_cast<std::uint64_t>(seed);
    // Unit loop gain: one period of public news moves the price all the way.
    c.impact_kappa = c.initial_price * c.shares_outstanding /
                     (c.aggressiveness_floor * c.newswatcher_wealth *
                      static_cast<double>(c.n_newswatchers));
    const auto r = run_simulation(c);
    const auto ns = static_cast<std::size_t>(c.n_stocks);
    for (const auto& e : r.events) {
      const std::int64_t t = e.period + 2;
      if (t >= c.n_periods) continue;  // no post-event window left
      const auto& row = r.panel[static_cast<std::size_t>(t) * ns + static_cast<std::size_t>(e.stock_id)];
      // News dated t itself is still private at t; take it out of the target.
      double target = row.fundamental;
      for (const auto& o : r.events)
        if (o.period == t && o.stock_id == e.stock_id) target /= 1.0 + o.jump;
      const double share = std::abs(row.price / target - 1.0) / std::abs(e.jump);
      worst = std::max(worst, share);
      ++checked;
      failed += share >= kEfficientShare;
    }
  }
  const double dt = seconds_since(t0);
  return {failed == 0 && checked > 0 && dt < kEfficientSeconds,
          fmt("%zu events, worst mispricing %.2e of the jump, %zu over 1%% (%.2f s)", checked, worst,
              failed, dt)};
}

// Per-seed statistics on the default configuration.
struct SeedStats {
  double mp5 = 0.0;
  double ac1 = 0.0;
  double mp_long = 0.0;
  double lvl_minus_hvl = 0.0;  // loser side, J = K = 5
  std::optional<std::int64_t> loser_cross, winner_cross;
  std::optional<std::int64_t> large_turn, small_turn;
  double overshoot_pos = 0.0, overshoot_neg = 0.0;
  std::size_t n_pos = 0, n_neg = 0;
};

SeedStats seed_stats(const MarketConfig& c, bool full) {
  const auto r = run_simulation(c);
  const PanelMatrix m(r.panel);
  SeedStats s;
  s.mp5 = momentum_profit(m, 5, 5);
  if (!full) return s;
  s.ac1 = return_autocorrelation(m, 1);
  s.mp_long = momentum_profit(m, 5, 5 * c.t_diff);
  const auto q = portfolio_sort(m, SortSpec{5, 5, 2, 2});
  s.lvl_minus_hvl = q.cell(0, 0) - q.cell(0, 1);
  const auto x = lifecycle_crossover(m, 5, kCrossoverHorizon);
  s.loser_cross = x.loser;
  s.winner_cross = x.winner;
  const auto imb = event_aligned_imbalance(r.trades, r.events, 3 * c.t_diff, c.shares_outstanding);
  s.large_turn = ImbalancePaths::turns_negative(imb, imb.large, 0);
  s.small_turn = ImbalancePaths::turns_negative(imb, imb.small, 0);

  // Largest move past the fundamental in the direction of the news, over the
  // diffusion period plus three momentum windows; zero if it never overshoots.
  const auto ns = static_cast<std::size_t>(c.n_stocks);
  const std::int64_t span = c.t_diff + 3 * c.momentum_window;
  for (const auto& e : r.events) {
    const double sign = e.jump > 0 ? 1.0 : -1.0;
    double worst = 0.0;
    for (std::int64_t t = e.period; t < std::min(c.n_periods, e.period + span); ++t) {
      const auto& row = r.panel[static_cast<std::size_t>(t) * ns + static_cast<std::size_t>(e.stock_id)];
      worst = std::max(worst, sign * (row.price / row.fundamental - 1.0));
    }
    if (sign > 0) {
      s.overshoot_pos += worst;
      ++s.n_pos;
    } else {
      s.overshoot_neg += worst;
      ++s.n_neg;
    }
  }
  return s;
}

MarketConfig default_config(int seed) {
  MarketConfig c;
  c.seed = static_cast<std::uint64_t>(seed);
  return c;
}

std::vector<SeedStats> g_default;  // filled by criterion 7
double g_default_seconds = 0.0;

int count(auto pred) {
  return static_cast<int>(std::count_if(g_default.begin(), g_default.end(), pred));
}

std::string share(int k) { return fmt("%d/%d", k, kSeeds); }

Verdict c7_momentum() {
  const auto t0 = Clock::now();
  for (int seed = 1; seed <= kSeeds; ++seed) g_default.push_back(seed_stats(default_config(seed), true));
  g_default_seconds = seconds_since(t0);
  const int mp = count([](const auto& s) { return s.mp5 > 0.0; });
  const int ac = count([](const auto& s) { return s.ac1 > 0.0; });
  const bool ok = mp >= kMomentumShare * kSeeds && ac >= kMomentumShare * kSeeds &&
                  g_default_seconds < kMomentumSeconds;
  return {ok, fmt("spread>0 in %s, lag-1 autocorrelation>0 in %s (%.1f s for the batch)",
                  share(mp).c_str(), share(ac).c_str(), g_default_seconds)};
}

Verdict c8_reversal() {
  const int k = count([](const auto& s) { return s.mp_long < 0.0; });
  double mean = 0.0;
  for (const auto& s : g_default) mean += s.mp_long / kSeeds;
  return {k >= kSignShare * kSeeds,
          fmt("J=5, K=%lld spread<0 in %s, mean %+.5f", static_cast<long long>(5 * MarketConfig{}.t_diff),
              share(k).c_str(), mean)};
}

Verdict c9_lifecycle() {
  const int lvl = count([](const auto& s) { return s.lvl_minus_hvl > 0.0; });
  // A winner crossover beyond the horizon counts as later than any loser one.
  const int later = count([](const auto& s) {
    return s.loser_cross && (!s.winner_cross || *s.winner_cross > *s.loser_cross);
  });
  const int beyond = count([](const auto& s) { return s.loser_cross && !s.winner_cross; });
  return {lvl >= kSignShare * kSeeds && later >= kSignShare * kSeeds,
          fmt("low-volume losers ahead in %s, winner crossover later in %s (%d beyond K=%lld)",
              share(lvl).c_str(), share(later).c_str(), beyond,
              static_cast<long long>(kCrossoverHorizon))};
}

Verdict c10_lead_lag() {
  const int k = count([](const auto& s) {
    return s.large_turn && (!s.small_turn || *s.large_turn < *s.small_turn);
  });
  return {k >= kSignShare * kSeeds, fmt("LARGE turns negative first in %s", share(k).c_str())};
}

Verdict c11_monotone() {
  const auto t0 = Clock::now();
  const std::int64_t diffusion[] = {5, 20, 80};
  double means[3] = {0, 0, 0};
  for (int i = 0; i < 3; ++i) {
    for (int seed = 1; seed <= kSeeds; ++seed) {
      double mp;
      if (diffusion[i] == MarketConfig{}.t_diff) {
        mp = g_default[static_cast<std::size_t>(seed - 1)].mp5;
      } else {
        auto c = default_config(seed);
        c.t_diff = diffusion[i];
        mp = seed_stats(c, false).mp5;
      }
      means[i] += mp / kSeeds;
    }
  }
  const bool ok = means[0] <= means[1] && means[1] <= means[2];
  return {ok, fmt("mean J=K=5 spread %+.5f / %+.5f / %+.5f for T_diff 5/20/80 (%.1f s)", means[0],
                  means[1], means[2], seconds_since(t0))};
}

Verdict c12_short_sales() {
  double pos = 0.0, neg = 0.0;
  std::size_t np = 0, nn = 0;
  for (const auto& s : g_default) {
    pos += s.overshoot_pos;
    neg += s.overshoot_neg;
    np += s.n_pos;
    nn += s.n_neg;
  }
  pos /= static_cast<double>(std::max<std::size_t>(np, 1));
  neg /= static_cast<double>(std::max<std::size_t>(nn, 1));
  return {nn > 0 && np > 0 && neg < pos,
          fmt("mean overshoot %.4f after bad news (%zu events) vs %.4f after good news (%zu)", neg, nn,
              pos, np)};
}

Verdict c13_determinism() {
  const auto dir = fs::temp_directory_path() / "infocycle_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  io::write_file(dir / "run.cfg", io::render_config(default_config(13)));
  bool ran = true;
  for (const char* sub : {"a", "b"}) {
    std::ostringstream out, err;
    const std::vector<std::string> args{"simulate", "--config", (dir / "run.cfg").string(), "--out",
                                        (dir / sub).string()};
    ran &= cli::dispatch(args, out, err) == 0;
  }
  int same = 0;
  const char* files[] = {"panel.csv", "trades.csv", "events.csv", "manifest.txt"};
  if (ran) {
    for (const char* f : files) same += io::read_file(dir / "a" / f) == io::read_file(dir / "b" / f);
  }
  fs::remove_all(dir);
  return {ran && same == 4, fmt("%d/4 files byte-identical across two runs", same)};
}

Verdict c14_insider() {
  const auto d = demos::insider_demo();
  const double jump = std::abs(d.event.jump);
  const bool ok = d.pre_volume > d.baseline_volume && d.pre_large > 0.0 &&
                  d.announcement_volume >= kAnnouncementMultiple * d.baseline_volume &&
                  d.post_mean_abs_return < kPostReturnShare * jump;
  return {ok, fmt("volume baseline %.0f, pre %.0f, announcement %.0f (%.0fx); pre LARGE %+.0f; "
                  "post |return| %.2e vs jump %.2f",
                  d.baseline_volume, d.pre_volume, d.announcement_volume,
                  d.announcement_volume / d.baseline_volume, d.pre_large, d.post_mean_abs_return,
                  jump)};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Verdict()>> criteria[] = {
      {"paper numerics", c1_paper_numbers},
      {"Gibbs property", c2_gibbs},
      {"channel limits", c3_channels},
      {"information value", c4_info_value},
      {"survival-threshold choices", c5_kahneman},
      {"efficient-market limit", c6_efficient_limit},
      {"momentum sign test", c7_momentum},
      {"long-horizon reversal", c8_reversal},
      {"life-cycle ordering", c9_lifecycle},
      {"lead-lag imbalance", c10_lead_lag},
      {"diffusion monotonicity", c11_monotone},
      {"short-sale asymmetry", c12_short_sales},
      {"determinism", c13_determinism},
      {"insider demo shape", c14_insider},
  };
  int failures = 0;
  int n = 0;
  for (const auto& [name, fn] : criteria) {
    ++n;
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    failures += !v.pass;
    std::printf("%s %2d %s: %s\n", v.pass ? "PASS" : "FAIL", n, name, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", n - failures, n);
  return failures == 0 ? 0 : 1;
}
