#pragma once

// Heterogeneous-agent market: news events reach newswatchers through noisy
// binary channels as they diffuse across the population, momentum traders
// chase trailing returns, and a proportional-impact market maker clears the
// net flow every period.
//
// Order sizes are a fraction of an agent's wealth converted to shares at the
// stock's initial price, so trading intensity does not drift with the price
// level over long runs.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "infocycle/channels.hpp"
#include "infocycle/decision.hpp"
#include "infocycle/errors.hpp"
#include "infocycle/market_config.hpp"
#include "infocycle/rng.hpp"

namespace infocycle {

inline constexpr double kPriceFloor = 1e-6;

enum class AgentClass : std::uint8_t { newswatcher, momentum };

/// Trade-size tag: newswatcher flow is LARGE, momentum flow is SMALL.
/// Liquidity trades cross each other and only add volume.
enum class TradeClass : std::uint8_t { newswatcher, momentum, liquidity };

constexpr std::string_view to_string(TradeClass c) noexcept {
  switch (c) {
    case TradeClass::newswatcher: return "newswatcher";
    case TradeClass::momentum: return "momentum";
    case TradeClass::liquidity: return "liquidity";
  }
  return "?";
}

struct EventRecord {
  std::int64_t period = 0;
  std::int64_t stock_id = 0;
  double jump = 0.0;  // signed fractional change to the fundamental, > -1

  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

struct AgentState {
  std::int64_t id = 0;
  AgentClass cls = AgentClass::newswatcher;
  double wealth = 0.0;
  Fidelity fidelity;
  std::vector<double> position;  // shares, one entry per stock
};

/// An event whose content is not yet common knowledge.
struct ActiveEvent {
  EventRecord event;
  double uplift = 1.0;  // current multiplicative contribution to the fundamental
  double frac = 0.0;    // public informed fraction at the last erosion step
};

struct StockState {
  double price = 0.0;
  double base_value = 0.0;  // fundamental implied by common knowledge
  std::vector<ActiveEvent> active;
  std::vector<double> price_history;  // price at the start of each period
  double mm_inventory = 0.0;

  // Last cleared period.
  double volume = 0.0;
  double turnover = 0.0;
  double imbalance_large = 0.0;
  double imbalance_small = 0.0;

  double fundamental() const noexcept {
    double f = base_value;
    for (const auto& a : active) f *= a.uplift;
    return f;
  }
};

struct MarketState {
  std::int64_t period = 0;
  std::vector<StockState> stocks;
};

struct Order {
  std::int64_t agent = -1;  // -1 for liquidity trades
  std::int64_t stock = 0;
  double shares = 0.0;  // signed, positive buys
  TradeClass tag = TradeClass::newswatcher;
};

struct TradeRecord {
  std::int64_t period = 0;
  std::int64_t stock_id = 0;
  TradeClass agent_class = TradeClass::newswatcher;
  double signed_shares = 0.0;
  double fill_price = 0.0;
};

struct PanelRecord {
  std::int64_t period = 0;
  std::int64_t stock_id = 0;
  double price = 0.0;
  double ret = 0.0;
  double volume = 0.0;
  double turnover = 0.0;
  double fundamental = 0.0;
  double frac_informed = 0.0;
  bool warmup = false;  // momentum traders still filling their window
};

struct SimulationResult {
  MarketConfig config;
  std::vector<PanelRecord> panel;  // ordered by (period, stock)
  std::vector<TradeRecord> trades;
  std::vector<EventRecord> events;
};

// ---------------------------------------------------------------------------
// News

inline double draw_jump(rng::Stream& stream, const MarketConfig& cfg) {
  const double magnitude = cfg.event_scale * std::exp(cfg.event_sigma * stream.normal());
  const bool good = stream.uniform() < 0.5;
  return good ? magnitude : -magnitude / (1.0 + magnitude);
}

/// Each stock-period independently carries an event with probability
/// event_rate. Deterministic in cfg.seed; one substream per stock-period.
inline std::vector<EventRecord> generate_events(const MarketConfig& cfg) {
  std::vector<EventRecord> events;
  if (cfg.event_rate <= 0.0) return events;
  for (std::int64_t t = 0; t < cfg.n_periods; ++t) {
    for (std::int64_t s = 0; s < cfg.n_stocks; ++s) {
      rng::Stream stream(cfg.seed, rng::Purpose::events,
                         {static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(t)});
      if (stream.uniform() < cfg.event_rate) events.push_back({t, s, draw_jump(stream, cfg)});
    }
  }
  return events;
}

/// Fraction of newswatchers that have received the event by `now`.
inline double frac_informed(const EventRecord& event, std::int64_t now, const MarketConfig& cfg) {
  if (now < event.period) {
    throw DomainError("frac_informed: period " + std::to_string(now) + " precedes the event at " +
                      std::to_string(event.period));
  }
  return std::min(1.0, static_cast<double>(now - event.period) / static_cast<double>(cfg.t_diff));
}

/// Public diffusion begins insider_lead periods after the event.
inline double public_frac(const EventRecord& event, std::int64_t now, const MarketConfig& cfg) {
  EventRecord shifted = event;
  shifted.period += cfg.insider_lead;
  return now < shifted.period ? 0.0 : frac_informed(shifted, now, cfg);
}

/// Public fraction, raised to the insider fraction while insiders trade alone.
inline double effective_frac(const EventRecord& event, std::int64_t now, const MarketConfig& cfg) {
  const double pub = public_frac(event, now, cfg);
  if (cfg.insider_lead > 0 && now >= event.period) return std::max(pub, cfg.insider_fraction);
  return pub;
}

/// info_value(max(P, 1/n)) scaled to [0, 1] by its value at P = 1/n, then
/// lifted onto [floor, 1].
inline double aggressiveness(double frac, const MarketConfig& cfg) {
  const double floor = cfg.aggressiveness_floor;
  if (cfg.n_newswatchers <= 1) return floor;
  const double p_min = 1.0 / static_cast<double>(cfg.n_newswatchers);
  const double p = std::max(frac, p_min);
  const double scaled = info_value(InformedFraction(p)) / info_value(InformedFraction(p_min));
  return floor + (1.0 - floor) * scaled;
}

// ---------------------------------------------------------------------------
// Agents and initial state

inline std::vector<AgentState> make_agents(const MarketConfig& cfg) {
  std::vector<AgentState> agents;
  agents.reserve(static_cast<std::size_t>(cfg.n_agents()));
  const CostModel cost(cfg.cost_alpha);
  const double d = cfg.wealth_dispersion;
  double total = 0.0;
  for (std::int64_t i = 0; i < cfg.n_agents(); ++i) {
    const bool news = i < cfg.n_newswatchers;
    rng::Stream stream(cfg.seed, rng::Purpose::agents, {static_cast<std::uint64_t>(i)});
    const double mean = news ? cfg.newswatcher_wealth : cfg.momentum_wealth;
    const double wealth = mean * std::exp(d * stream.normal() - 0.5 * d * d);
    AgentState a;
    a.id = i;
    a.cls = news ? AgentClass::newswatcher : AgentClass::momentum;
    a.wealth = wealth;
    a.fidelity = news ? choose_fidelity(wealth, cfg.budget_share, cfg.event_scale, cost)
                      : Fidelity::uninformed();
    total += wealth;
    agents.push_back(std::move(a));
  }
  const double held = cfg.endowment_share * cfg.shares_outstanding;
  for (auto& a : agents) {
    a.position.assign(static_cast<std::size_t>(cfg.n_stocks), held * a.wealth / total);
  }
  return agents;
}

inline MarketState initial_state(const MarketConfig& cfg, std::span<const AgentState> agents) {
  MarketState state;
  state.stocks.resize(static_cast<std::size_t>(cfg.n_stocks));
  for (std::size_t s = 0; s < state.stocks.size(); ++s) {
    auto& st = state.stocks[s];
    st.price = cfg.initial_price;
    st.base_value = cfg.initial_price;
    st.price_history.reserve(static_cast<std::size_t>(cfg.n_periods) + 1);
    st.price_history.push_back(cfg.initial_price);
    double held = 0.0;
    for (const auto& a : agents) held += a.position[s];
    st.mm_inventory = cfg.shares_outstanding - held;
  }
  return state;
}

// ---------------------------------------------------------------------------
// Order generation

namespace detail {

inline double clip_short(double order, double position, bool short_allowed) noexcept {
  if (short_allowed) return order;
  return std::max(order, -std::max(position, 0.0));
}

inline std::uint64_t u64(std::int64_t v) noexcept { return static_cast<std::uint64_t>(v); }

}  // namespace detail

/// Value of `stock` as perceived by one newswatcher, and how hard it trades.
struct Perception {
  double value = 0.0;
  double aggressiveness = 0.0;
};

inline Perception perceive(const StockState& stock, std::int64_t stock_id, const AgentState& agent,
                           std::int64_t now, const MarketConfig& cfg) {
  Perception out{stock.base_value, cfg.aggressiveness_floor};
  for (const auto& a : stock.active) {
    const double frac = effective_frac(a.event, now, cfg);
    const std::uint64_t key_stock = detail::u64(stock_id);
    const std::uint64_t key_period = detail::u64(a.event.period);
    const std::uint64_t key_agent = detail::u64(agent.id);
    const double order_u =
        rng::uniform_at(cfg.seed, rng::Purpose::diffusion, {key_stock, key_period, key_agent});
    if (!(order_u < frac)) continue;

    Fidelity q = agent.fidelity;
    if (cfg.fidelity_learning) {
      q = learning_update(LearningRule(q, cfg.learning_rate), now - a.event.period);
    }
    const double decode_u =
        rng::uniform_at(cfg.seed, rng::Purpose::decoding, {key_stock, key_period, key_agent});
    // A wrong decode reads the same magnitude with the opposite sign.
    out.value *= decode_u < q.value() ? a.uplift : 1.0 / a.uplift;
    out.aggressiveness = std::max(out.aggressiveness, aggressiveness(frac, cfg));
  }
  return out;
}

/// Fundamental traders: buy below their perceived value, sell above it.
inline std::vector<Order> newswatcher_orders(const MarketState& state,
                                             std::span<const AgentState> agents, std::int64_t now,
                                             const MarketConfig& cfg) {
  std::vector<Order> orders;
  for (std::size_t s = 0; s < state.stocks.size(); ++s) {
    const auto& stock = state.stocks[s];
    const double p = stock.price;
    for (const auto& agent : agents) {
      if (agent.cls != AgentClass::newswatcher) continue;
      const auto view = perceive(stock, static_cast<std::int64_t>(s), agent, now, cfg);
      double shares =
          view.aggressiveness * (view.value - p) / p * agent.wealth / cfg.initial_price;
      shares = detail::clip_short(shares, agent.position[s], cfg.newswatcher_short_allowed);
      if (shares != 0.0) {
        orders.push_back({agent.id, static_cast<std::int64_t>(s), shares, TradeClass::newswatcher});
      }
    }
  }
  return orders;
}

/// Trailing return over the momentum window ending at the start of `now`;
/// zero during warm-up.
inline double trailing_return(const StockState& stock, std::int64_t now, const MarketConfig& cfg) {
  if (now < cfg.momentum_window) return 0.0;
  const auto& h = stock.price_history;
  const auto end = static_cast<std::size_t>(now);
  if (end >= h.size()) return 0.0;
  return h[end] / h[end - static_cast<std::size_t>(cfg.momentum_window)] - 1.0;
}

/// Trend followers: order = gain * trailing return * wealth in shares.
inline std::vector<Order> momentum_orders(const MarketState& state,
                                          std::span<const AgentState> agents, std::int64_t now,
                                          const MarketConfig& cfg) {
  std::vector<Order> orders;
  if (now < cfg.momentum_window) return orders;
  for (std::size_t s = 0; s < state.stocks.size(); ++s) {
    const double r = trailing_return(state.stocks[s], now, cfg);
    if (r == 0.0) continue;
    for (const auto& agent : agents) {
      if (agent.cls != AgentClass::momentum) continue;
      double shares = cfg.momentum_gain * r * agent.wealth / cfg.initial_price;
      shares = detail::clip_short(shares, agent.position[s], cfg.momentum_short_allowed);
      if (shares != 0.0) {
        orders.push_back({agent.id, static_cast<std::int64_t>(s), shares, TradeClass::momentum});
      }
    }
  }
  return orders;
}

/// Crossing buy/sell pairs that add volume without moving the price.
inline std::vector<Order> liquidity_orders(const MarketState& state, std::int64_t now,
                                           const MarketConfig& cfg) {
  std::vector<Order> orders;
  if (cfg.noise_volume <= 0.0) return orders;
  for (std::size_t s = 0; s < state.stocks.size(); ++s) {
    rng::Stream stream(cfg.seed, rng::Purpose::noise, {detail::u64(now), s});
    const double half = 0.5 * cfg.noise_volume * stream.exponential();
    orders.push_back({-1, static_cast<std::int64_t>(s), half, TradeClass::liquidity});
    orders.push_back({-1, static_cast<std::int64_t>(s), -half, TradeClass::liquidity});
  }
  return orders;
}

// ---------------------------------------------------------------------------
// Clearing and fundamentals

/// Fills every order at price * (1 + kappa * net / shares_outstanding)
/// against the market maker and returns one trade record per active class.
inline std::vector<TradeRecord> clear_market(MarketState& state, std::span<AgentState> agents,
                                             std::span<const Order> orders,
                                             const MarketConfig& cfg) {
  const std::size_t n = state.stocks.size();
  struct Flow {
    double net = 0.0;
    double gross = 0.0;
  };
  std::vector<std::array<Flow, 3>> flows(n);
  for (const auto& o : orders) {
    auto& f = flows[static_cast<std::size_t>(o.stock)][static_cast<std::size_t>(o.tag)];
    f.net += o.shares;
    f.gross += std::abs(o.shares);
  }

  std::vector<TradeRecord> trades;
  for (std::size_t s = 0; s < n; ++s) {
    auto& st = state.stocks[s];
    const auto& f = flows[s];
    // Liquidity trades cross each other; only agent flow hits the market maker.
    const double net = f[0].net + f[1].net;
    const double gross = f[0].gross + f[1].gross + f[2].gross;
    st.price = std::max(kPriceFloor, st.price * (1.0 + cfg.impact_kappa * net / cfg.shares_outstanding));
    st.mm_inventory -= net;
    st.volume = gross;
    st.turnover = gross / cfg.shares_outstanding;
    st.imbalance_large = f[0].net;
    st.imbalance_small = f[1].net;
    for (std::size_t c = 0; c < 3; ++c) {
      if (f[c].gross > 0.0) {
        trades.push_back({state.period, static_cast<std::int64_t>(s), static_cast<TradeClass>(c),
                          f[c].net, st.price});
      }
    }
  }
  for (const auto& o : orders) {
    if (o.agent >= 0) {
      agents[static_cast<std::size_t>(o.agent)].position[static_cast<std::size_t>(o.stock)] +=
          o.shares;
    }
  }
  return trades;
}

/// Competitors absorb good news as it spreads: each period a positive
/// event's uplift loses value_erosion * (increase in informed fraction) of
/// its original jump, so full diffusion gives back value_erosion of it.
inline void apply_value_erosion(MarketState& state, std::int64_t now, const MarketConfig& cfg) {
  for (auto& st : state.stocks) {
    for (auto& a : st.active) {
      const double frac = public_frac(a.event, now, cfg);
      const double delta = frac - a.frac;
      if (cfg.value_erosion > 0.0 && a.event.jump > 0.0 && delta > 0.0) {
        a.uplift *= 1.0 - cfg.value_erosion * delta * a.event.jump / a.uplift;
      }
      a.frac = frac;
    }
  }
}

/// Fully diffused events become common knowledge and fold into base_value.
inline void retire_public_events(MarketState& state) {
  for (auto& st : state.stocks) {
    std::erase_if(st.active, [&](const ActiveEvent& a) {
      if (a.frac < 1.0) return false;
      st.base_value *= a.uplift;
      return true;
    });
  }
}

// ---------------------------------------------------------------------------
// Driver

/// One run, stepped period by period. Deterministic in its config.
class Simulation {
 public:
  explicit Simulation(MarketConfig cfg) : Simulation(cfg, (cfg.validate(), generate_events(cfg))) {}

  /// Runs against an explicit event schedule instead of drawing one.
  Simulation(MarketConfig cfg, std::vector<EventRecord> events)
      : cfg_(std::move(cfg)), events_(std::move(events)) {
    cfg_.validate();
    for (const auto& e : events_) {
      if (e.stock_id < 0 || e.stock_id >= cfg_.n_stocks || e.period < 0 || !(e.jump > -1.0)) {
        throw ValidationError("event schedule: event out of range");
      }
    }
    std::stable_sort(events_.begin(), events_.end(), [](const auto& a, const auto& b) {
      return a.period != b.period ? a.period < b.period : a.stock_id < b.stock_id;
    });
    agents_ = make_agents(cfg_);
    state_ = initial_state(cfg_, agents_);
    panel_.reserve(static_cast<std::size_t>(cfg_.n_periods * cfg_.n_stocks));
  }

  bool done() const noexcept { return state_.period >= cfg_.n_periods; }

  void step() {
    const std::int64_t now = state_.period;
    while (next_event_ < events_.size() && events_[next_event_].period <= now) {
      const auto& e = events_[next_event_++];
      if (e.period == now) {
        state_.stocks[static_cast<std::size_t>(e.stock_id)].active.push_back({e, 1.0 + e.jump, 0.0});
      }
    }

    auto orders = newswatcher_orders(state_, agents_, now, cfg_);
    auto mom = momentum_orders(state_, agents_, now, cfg_);
    auto liq = liquidity_orders(state_, now, cfg_);
    orders.insert(orders.end(), mom.begin(), mom.end());
    orders.insert(orders.end(), liq.begin(), liq.end());

    std::vector<double> before(state_.stocks.size());
    for (std::size_t s = 0; s < before.size(); ++s) before[s] = state_.stocks[s].price;

    auto trades = clear_market(state_, agents_, orders, cfg_);
    trades_.insert(trades_.end(), trades.begin(), trades.end());
    apply_value_erosion(state_, now, cfg_);

    for (std::size_t s = 0; s < state_.stocks.size(); ++s) {
      auto& st = state_.stocks[s];
      double frac = 0.0;
      std::int64_t latest = -1;
      for (const auto& a : st.active) {
        if (a.event.period > latest) {
          latest = a.event.period;
          frac = a.frac;
        }
      }
      panel_.push_back({now, static_cast<std::int64_t>(s), st.price, st.price / before[s] - 1.0,
                        st.volume, st.turnover, st.fundamental(), frac,
                        now < cfg_.momentum_window});
      st.price_history.push_back(st.price);
    }
    retire_public_events(state_);
    ++state_.period;
  }

  void run() {
    while (!done()) step();
  }

  const MarketConfig& config() const noexcept { return cfg_; }
  const MarketState& state() const noexcept { return state_; }
  const std::vector<AgentState>& agents() const noexcept { return agents_; }
  const std::vector<PanelRecord>& panel() const noexcept { return panel_; }
  const std::vector<TradeRecord>& trades() const noexcept { return trades_; }
  const std::vector<EventRecord>& events() const noexcept { return events_; }

  SimulationResult finish() && {
    return {std::move(cfg_), std::move(panel_), std::move(trades_), std::move(events_)};
  }

 private:
  MarketConfig cfg_;
  std::vector<EventRecord> events_;
  std::size_t next_event_ = 0;
  std::vector<AgentState> agents_;
  MarketState state_;
  std::vector<PanelRecord> panel_;
  std::vector<TradeRecord> trades_;
};

inline SimulationResult run_simulation(const MarketConfig& cfg) {
  Simulation sim(cfg);
  sim.run();
  return std::move(sim).finish();
}

inline SimulationResult run_simulation(const MarketConfig& cfg, std::vector<EventRecord> events) {
  Simulation sim(cfg, std::move(events));
  sim.run();
  return std::move(sim).finish();
}

}  // namespace infocycle
