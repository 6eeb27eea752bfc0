#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

#include "infocycle/errors.hpp"

namespace infocycle {

/// Every free parameter of a market run. All fields are scalars so the
/// config file is a flat `key = value` list; see kConfigFields for the
/// key names, which keys are required and the documented defaults.
struct MarketConfig {
  // Population and horizon.
  std::int64_t n_stocks = 50;
  std::int64_t n_periods = 2000;
  std::int64_t n_newswatchers = 50;
  std::int64_t n_momentum = 150;

  // News. Magnitudes are lognormal with median event_scale; a bad-news event
  // divides the fundamental by (1 + magnitude), good news multiplies by it.
  double event_rate = 0.01;
  double event_scale = 0.10;
  double event_sigma = 0.25;

  // Periods for an event to reach every newswatcher.
  std::int64_t t_diff = 20;

  // Price impact per unit net flow, as a fraction of shares outstanding.
  // Together with the two wealth levels this sets the feedback loop gains:
  // momentum kappa*gain*W_mom/(p0*S) per unit trailing return against
  // newswatcher anchoring kappa*floor*W_news/(p0*S). The defaults keep the
  // linearized loop's spectral radius near 0.95; much more momentum wealth,
  // a longer window or a lower floor lets prices run away.
  double impact_kappa = 3.0;
  double shares_outstanding = 1e6;
  double initial_price = 10.0;

  std::int64_t momentum_window = 10;
  double momentum_gain = 1.0;

  bool newswatcher_short_allowed = true;
  bool momentum_short_allowed = false;

  // Fraction of a good-news uplift given back to competitors as the news
  // spreads; 1 gives the whole uplift back by full diffusion.
  double value_erosion = 1.0;

  // Information acquisition.
  double cost_alpha = 5.0e3;
  double budget_share = 0.01;

  // Wealth. Means per agent; dispersion is the lognormal sigma.
  double newswatcher_wealth = 2.0e5;
  double momentum_wealth = 6.0e3;
  double wealth_dispersion = 0.5;
  // Fraction of shares outstanding initially held by agents (by wealth).
  double endowment_share = 0.5;

  // Trading intensity of a newswatcher whose news is already public.
  double aggressiveness_floor = 0.25;

  // Insiders trade from the event period; public diffusion starts
  // insider_lead periods later.
  std::int64_t insider_lead = 0;
  double insider_fraction = 0.05;

  // Mean gross liquidity volume per stock-period, in shares. Liquidity
  // trades cross each other and carry no price impact.
  double noise_volume = 0.0;

  // Per-agent fidelity learning on top of population diffusion.
  bool fidelity_learning = false;
  double learning_rate = 0.1;

  std::uint64_t seed = 1;

  std::int64_t n_agents() const noexcept { return n_newswatchers + n_momentum; }

  /// Throws ValidationError naming the first offending key.
  void validate() const;
};

using ConfigMember =
    std::variant<std::int64_t MarketConfig::*, double MarketConfig::*, bool MarketConfig::*,
                 std::uint64_t MarketConfig::*>;

struct ConfigField {
  std::string_view key;
  ConfigMember member;
  bool required;
};

inline constexpr auto kConfigFields = std::to_array<ConfigField>({
    {"n_stocks", &MarketConfig::n_stocks, true},
    {"n_periods", &MarketConfig::n_periods, true},
    {"n_newswatchers", &MarketConfig::n_newswatchers, true},
    {"n_momentum", &MarketConfig::n_momentum, true},
    {"event_rate", &MarketConfig::event_rate, true},
    {"event_scale", &MarketConfig::event_scale, false},
    {"event_sigma", &MarketConfig::event_sigma, false},
    {"t_diff", &MarketConfig::t_diff, false},
    {"impact_kappa", &MarketConfig::impact_kappa, false},
    {"shares_outstanding", &MarketConfig::shares_outstanding, false},
    {"initial_price", &MarketConfig::initial_price, false},
    {"momentum_window", &MarketConfig::momentum_window, false},
    {"momentum_gain", &MarketConfig::momentum_gain, false},
    {"newswatcher_short_allowed", &MarketConfig::newswatcher_short_allowed, false},
    {"momentum_short_allowed", &MarketConfig::momentum_short_allowed, false},
    {"value_erosion", &MarketConfig::value_erosion, false},
    {"cost_alpha", &MarketConfig::cost_alpha, false},
    {"budget_share", &MarketConfig::budget_share, false},
    {"newswatcher_wealth", &MarketConfig::newswatcher_wealth, false},
    {"momentum_wealth", &MarketConfig::momentum_wealth, false},
    {"wealth_dispersion", &MarketConfig::wealth_dispersion, false},
    {"endowment_share", &MarketConfig::endowment_share, false},
    {"aggressiveness_floor", &MarketConfig::aggressiveness_floor, false},
    {"insider_lead", &MarketConfig::insider_lead, false},
    {"insider_fraction", &MarketConfig::insider_fraction, false},
    {"noise_volume", &MarketConfig::noise_volume, false},
    {"fidelity_learning", &MarketConfig::fidelity_learning, false},
    {"learning_rate", &MarketConfig::learning_rate, false},
    {"seed", &MarketConfig::seed, true},
});

namespace detail {

[[noreturn]] inline void config_range_error(std::string_view key, const std::string& what) {
  throw ConfigKeyError(std::string(key), what);
}

inline void require_unit(std::string_view key, double v) {
  if (!(v >= 0.0 && v <= 1.0)) config_range_error(key, "must lie in [0, 1], got " + std::to_string(v));
}

inline void require_positive(std::string_view key, double v) {
  if (!(v > 0.0) || !std::isfinite(v)) config_range_error(key, "must be finite and > 0");
}

inline void require_nonneg(std::string_view key, double v) {
  if (!(v >= 0.0) || !std::isfinite(v)) config_range_error(key, "must be finite and >= 0");
}

}  // namespace detail

inline void MarketConfig::validate() const {
  using namespace detail;
  if (n_stocks < 1) config_range_error("n_stocks", "must be >= 1");
  if (n_periods < 1) config_range_error("n_periods", "must be >= 1");
  if (n_newswatchers < 1) config_range_error("n_newswatchers", "must be >= 1");
  if (n_momentum < 0) config_range_error("n_momentum", "must be >= 0");
  require_unit("event_rate", event_rate);
  require_positive("event_scale", event_scale);
  require_nonneg("event_sigma", event_sigma);
  if (t_diff < 1) config_range_error("t_diff", "must be >= 1");
  require_positive("impact_kappa", impact_kappa);
  require_positive("shares_outstanding", shares_outstanding);
  require_positive("initial_price", initial_price);
  if (momentum_window < 1) config_range_error("momentum_window", "must be >= 1");
  require_nonneg("momentum_gain", momentum_gain);
  require_unit("value_erosion", value_erosion);
  require_positive("cost_alpha", cost_alpha);
  require_unit("budget_share", budget_share);
  require_positive("newswatcher_wealth", newswatcher_wealth);
  require_positive("momentum_wealth", momentum_wealth);
  require_nonneg("wealth_dispersion", wealth_dispersion);
  require_unit("endowment_share", endowment_share);
  require_unit("aggressiveness_floor", aggressiveness_floor);
  if (insider_lead < 0) config_range_error("insider_lead", "must be >= 0");
  require_unit("insider_fraction", insider_fraction);
  require_nonneg("noise_volume", noise_volume);
  require_nonneg("learning_rate", learning_rate);
}

}  // namespace infocycle
