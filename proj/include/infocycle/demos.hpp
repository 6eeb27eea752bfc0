#pragma once

// Embedded scenarios behind `demo kahneman` and `demo insider`; they need no
// external files.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "infocycle/decision.hpp"
#include "infocycle/market.hpp"

namespace infocycle::demos {

// ---------------------------------------------------------------------------
// Survival-threshold choice between two framed lottery pairs.

struct NamedLottery {
  std::string name;
  std::vector<Outcome> pounds;  // as stated to respondents
  Lottery lottery;              // in subsistence days
};

struct ChoiceProblem {
  std::vector<NamedLottery> options;
  std::size_t chosen = 0;
};

struct KahnemanDemo {
  double threshold_days = 30.0;
  double pounds_per_day = 100.0;
  std::vector<ChoiceProblem> problems;
};

/// Gain frame: the chooser sits at the starvation line, so a 0 outcome is
/// fatal. Loss frame: losses come out of a normal reserve.
inline KahnemanDemo kahneman_demo(double threshold_days = 30.0, double pounds_per_day = 100.0) {
  if (!(pounds_per_day > 0.0)) throw ValidationError("pounds_per_day must be > 0");
  KahnemanDemo d;
  d.threshold_days = threshold_days;
  d.pounds_per_day = pounds_per_day;
  const auto option = [&](std::string name, std::vector<Outcome> pounds, double baseline_days) {
    std::vector<Outcome> days = pounds;
    for (auto& o : days) o.value /= pounds_per_day;
    return NamedLottery{std::move(name), std::move(pounds), Lottery(std::move(days), baseline_days)};
  };
  const double t = threshold_days;
  ChoiceProblem gain{{option("A", {{4000.0, 0.8}, {0.0, 0.2}}, -t), option("B", {{3000.0, 1.0}}, -t)}};
  ChoiceProblem loss{{option("C", {{-4000.0, 0.8}, {0.0, 0.2}}, 0.0), option("D", {{-3000.0, 1.0}}, 0.0)}};
  for (auto* p : {&gain, &loss}) {
    std::vector<Lottery> ls;
    for (const auto& o : p->options) ls.push_back(o.lottery);
    p->chosen = survival_choice(ls, t);
  }
  d.problems = {gain, loss};
  return d;
}

// ---------------------------------------------------------------------------
// Informed buying ahead of a public announcement.

struct InsiderPeriod {
  std::int64_t period = 0;
  double price = 0.0;
  double ret = 0.0;
  double volume = 0.0;
  double large = 0.0;  // newswatcher net shares
  double small = 0.0;  // momentum net shares
  double fundamental = 0.0;
};

struct InsiderDemo {
  MarketConfig config;
  EventRecord event;
  std::int64_t announcement = 0;  // first period with the news fully public
  std::vector<InsiderPeriod> path;

  double baseline_volume = 0.0;  // mean over the quiet periods before the event
  double pre_volume = 0.0;       // mean over event .. announcement - 1
  double pre_large = 0.0;        // mean newswatcher net shares over the same span
  double announcement_volume = 0.0;
  double post_mean_abs_return = 0.0;  // periods after the announcement
  std::int64_t post_periods = 10;
};

inline MarketConfig insider_config() {
  MarketConfig c;
  c.n_stocks = 1;
  c.n_periods = 60;
  c.n_newswatchers = 100;
  c.n_momentum = 0;
  c.event_rate = 0.0;  // the single event is scheduled
  c.t_diff = 1;
  c.insider_lead = 1;
  c.insider_fraction = 0.05;
  c.value_erosion = 0.0;
  c.wealth_dispersion = 0.0;
  c.budget_share = 1.0;  // perfect channels
  c.noise_volume = 2000.0;
  // Public news is fully priced in one period:
  // kappa * floor * total newswatcher wealth / (p0 * S) = 1.
  c.impact_kappa = c.initial_price * c.shares_outstanding /
                   (c.aggressiveness_floor * c.newswatcher_wealth *
                    static_cast<double>(c.n_newswatchers));
  c.seed = 7;
  return c;
}

inline InsiderDemo insider_demo() {
  InsiderDemo d;
  d.config = insider_config();
  d.event = {30, 0, 0.40};
  d.announcement = d.event.period + d.config.insider_lead + d.config.t_diff;

  const auto result = run_simulation(d.config, {d.event});
  d.path.resize(result.panel.size());
  for (std::size_t i = 0; i < result.panel.size(); ++i) {
    const auto& r = result.panel[i];
    d.path[i] = {r.period, r.price, r.ret, r.volume, 0.0, 0.0, r.fundamental};
  }
  for (const auto& t : result.trades) {
    auto& p = d.path[static_cast<std::size_t>(t.period)];
    if (t.agent_class == TradeClass::newswatcher) p.large += t.signed_shares;
    if (t.agent_class == TradeClass::momentum) p.small += t.signed_shares;
  }

  const auto mean_over = [&](std::int64_t from, std::int64_t to, auto field) {
    double s = 0.0;
    for (std::int64_t t = from; t < to; ++t) s += field(d.path[static_cast<std::size_t>(t)]);
    return s / static_cast<double>(to - from);
  };
  const std::int64_t quiet_from = d.config.momentum_window;
  d.baseline_volume = mean_over(quiet_from, d.event.period, [](const auto& p) { return p.volume; });
  d.pre_volume = mean_over(d.event.period, d.announcement, [](const auto& p) { return p.volume; });
  d.pre_large = mean_over(d.event.period, d.announcement, [](const auto& p) { return p.large; });
  d.announcement_volume = d.path[static_cast<std::size_t>(d.announcement)].volume;
  d.post_mean_abs_return = mean_over(d.announcement + 1, d.announcement + 1 + d.post_periods,
                                     [](const auto& p) { return std::abs(p.ret); });
  return d;
}

}  // namespace infocycle::demos
