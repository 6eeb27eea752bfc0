#pragma once

// Panel diagnostics: return/volume portfolio sorts, winner-minus-loser
// profits, event-aligned order imbalance by trade class and pooled return
// autocorrelation.
//
// Conventions:
//  * Bins are rank based per formation date: bin = floor(k * #{strictly
//    smaller} / n), so ties land in the lower bin.
//  * Overlapping holding periods are aggregated in calendar time: each
//    formation date yields one mean per cell and dates are equally weighted.
//  * Warm-up rows are excluded; the first usable row's price is the base of
//    the first trailing return.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "infocycle/errors.hpp"
#include "infocycle/market.hpp"

namespace infocycle {

struct SortSpec {
  std::int64_t formation = 5;  // J
  std::int64_t holding = 5;    // K
  std::int64_t return_bins = 2;
  std::int64_t volume_bins = 2;

  void validate() const {
    if (formation < 1) throw ValidationError("sort spec: formation period J must be >= 1");
    if (holding < 1) throw ValidationError("sort spec: holding period K must be >= 1");
    if (return_bins < 2) throw ValidationError("sort spec: return_bins must be >= 2");
    if (volume_bins < 2) throw ValidationError("sort spec: volume_bins must be >= 2");
  }
};

/// Balanced period x stock view of a panel.
class PanelMatrix {
 public:
  explicit PanelMatrix(std::span<const PanelRecord> panel) {
    if (panel.empty()) throw ValidationError("panel is empty");
    std::vector<std::int64_t> periods, stocks;
    for (const auto& r : panel) {
      periods.push_back(r.period);
      stocks.push_back(r.stock_id);
    }
    const auto uniq = [](std::vector<std::int64_t>& v) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    uniq(periods);
    uniq(stocks);
    n_periods_ = periods.size();
    n_stocks_ = stocks.size();
    if (panel.size() != n_periods_ * n_stocks_) {
      throw ValidationError("panel is not balanced: expected one row per (period, stock)");
    }
    const auto index_of = [](const std::vector<std::int64_t>& v, std::int64_t x) {
      return static_cast<std::size_t>(std::lower_bound(v.begin(), v.end(), x) - v.begin());
    };
    price_.assign(n_periods_ * n_stocks_, std::nan(""));
    turnover_.assign(n_periods_ * n_stocks_, 0.0);
    ret_.assign(n_periods_ * n_stocks_, 0.0);
    warmup_.assign(n_periods_, false);
    for (const auto& r : panel) {
      const std::size_t t = index_of(periods, r.period);
      const std::size_t s = index_of(stocks, r.stock_id);
      const std::size_t k = t * n_stocks_ + s;
      if (!std::isnan(price_[k])) {
        throw ValidationError("panel has a duplicate row for period " + std::to_string(r.period) +
                              ", stock " + std::to_string(r.stock_id));
      }
      if (!(r.price > 0.0)) throw ValidationError("panel has a non-positive price");
      price_[k] = r.price;
      turnover_[k] = r.turnover;
      ret_[k] = r.ret;
      if (r.warmup) warmup_[t] = true;
    }
    first_usable_ = 0;
    while (first_usable_ < n_periods_ && warmup_[first_usable_]) ++first_usable_;
  }

  std::size_t periods() const noexcept { return n_periods_; }
  std::size_t stocks() const noexcept { return n_stocks_; }
  std::size_t first_usable() const noexcept { return first_usable_; }
  std::size_t usable_periods() const noexcept { return n_periods_ - first_usable_; }

  double price(std::size_t t, std::size_t s) const { return price_[t * n_stocks_ + s]; }
  double turnover(std::size_t t, std::size_t s) const { return turnover_[t * n_stocks_ + s]; }
  double ret(std::size_t t, std::size_t s) const { return ret_[t * n_stocks_ + s]; }

 private:
  std::size_t n_periods_ = 0;
  std::size_t n_stocks_ = 0;
  std::size_t first_usable_ = 0;
  std::vector<double> price_;
  std::vector<double> turnover_;
  std::vector<double> ret_;
  std::vector<bool> warmup_;
};

namespace detail {

/// floor(k * #{v < x} / n), ties to the lower bin.
inline std::vector<std::size_t> rank_bins(std::span<const double> values, std::size_t k) {
  const std::size_t n = values.size();
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> bins(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto below = static_cast<std::size_t>(
        std::lower_bound(sorted.begin(), sorted.end(), values[i]) - sorted.begin());
    bins[i] = std::min(k - 1, below * k / n);
  }
  return bins;
}

}  // namespace detail

/// Bin memberships for every formation date of a (J, bins) sort.
struct SortAssignment {
  std::int64_t formation = 0;
  std::size_t return_bins = 0;
  std::size_t volume_bins = 0;
  std::size_t first_date = 0;  // first formation period index
  std::size_t stocks = 0;
  // [date - first_date][stock]
  std::vector<std::vector<std::size_t>> return_bin;
  std::vector<std::vector<std::size_t>> volume_bin;
};

inline SortAssignment assign_bins(const PanelMatrix& m, std::int64_t formation,
                                  std::int64_t return_bins, std::int64_t volume_bins) {
  SortAssignment a;
  a.formation = formation;
  a.return_bins = static_cast<std::size_t>(return_bins);
  a.volume_bins = static_cast<std::size_t>(volume_bins);
  a.first_date = m.first_usable() + static_cast<std::size_t>(formation);
  a.stocks = m.stocks();
  const auto j = static_cast<std::size_t>(formation);
  std::vector<double> past(m.stocks()), turn(m.stocks());
  for (std::size_t t = a.first_date; t < m.periods(); ++t) {
    for (std::size_t s = 0; s < m.stocks(); ++s) {
      past[s] = m.price(t, s) / m.price(t - j, s) - 1.0;
      double sum = 0.0;
      for (std::size_t u = t + 1 - j; u <= t; ++u) sum += m.turnover(u, s);
      turn[s] = sum / static_cast<double>(j);
    }
    a.return_bin.push_back(detail::rank_bins(past, a.return_bins));
    a.volume_bin.push_back(detail::rank_bins(turn, a.volume_bins));
  }
  return a;
}

/// Mean future return per (return bin x volume bin) cell.
struct QuadrantTable {
  std::size_t return_bins = 0;
  std::size_t volume_bins = 0;
  std::vector<double> mean;          // [return_bin * volume_bins + volume_bin]
  std::vector<std::int64_t> count;   // stock-dates per cell
  std::vector<double> winner_minus_loser;  // per volume bin
  double spread = 0.0;  // extreme return bins, pooled over volume bins
  std::size_t dates = 0;

  double cell(std::size_t r, std::size_t v) const { return mean[r * volume_bins + v]; }
  std::int64_t cell_count(std::size_t r, std::size_t v) const { return count[r * volume_bins + v]; }
};

inline QuadrantTable tabulate(const PanelMatrix& m, const SortAssignment& a, std::int64_t holding) {
  const auto k = static_cast<std::size_t>(holding);
  const std::size_t cells = a.return_bins * a.volume_bins;
  QuadrantTable q;
  q.return_bins = a.return_bins;
  q.volume_bins = a.volume_bins;
  q.count.assign(cells, 0);
  std::vector<double> cell_sum(cells, 0.0);
  std::vector<std::int64_t> cell_dates(cells, 0);
  double spread_sum = 0.0;
  std::size_t spread_dates = 0;

  std::vector<double> date_sum(cells);
  std::vector<std::int64_t> date_n(cells);
  const std::size_t top = a.return_bins - 1;
  for (std::size_t t = a.first_date; t + k < m.periods(); ++t) {
    const auto& rb = a.return_bin[t - a.first_date];
    const auto& vb = a.volume_bin[t - a.first_date];
    std::fill(date_sum.begin(), date_sum.end(), 0.0);
    std::fill(date_n.begin(), date_n.end(), 0);
    double win = 0.0, lose = 0.0;
    std::int64_t n_win = 0, n_lose = 0;
    for (std::size_t s = 0; s < a.stocks; ++s) {
      const double future = m.price(t + k, s) / m.price(t, s) - 1.0;
      const std::size_t c = rb[s] * a.volume_bins + vb[s];
      date_sum[c] += future;
      ++date_n[c];
      if (rb[s] == top) {
        win += future;
        ++n_win;
      } else if (rb[s] == 0) {
        lose += future;
        ++n_lose;
      }
    }
    for (std::size_t c = 0; c < cells; ++c) {
      q.count[c] += date_n[c];
      if (date_n[c] > 0) {
        cell_sum[c] += date_sum[c] / static_cast<double>(date_n[c]);
        ++cell_dates[c];
      }
    }
    if (n_win > 0 && n_lose > 0) {
      spread_sum += win / static_cast<double>(n_win) - lose / static_cast<double>(n_lose);
      ++spread_dates;
    }
    ++q.dates;
  }
  q.mean.assign(cells, 0.0);
  for (std::size_t c = 0; c < cells; ++c) {
    q.mean[c] = cell_dates[c] > 0 ? cell_sum[c] / static_cast<double>(cell_dates[c]) : 0.0;
  }
  q.winner_minus_loser.resize(a.volume_bins);
  for (std::size_t v = 0; v < a.volume_bins; ++v) q.winner_minus_loser[v] = q.cell(top, v) - q.cell(0, v);
  q.spread = spread_dates > 0 ? spread_sum / static_cast<double>(spread_dates) : 0.0;
  return q;
}

inline void require_span(const PanelMatrix& m, std::int64_t formation, std::int64_t holding) {
  const auto need = static_cast<std::size_t>(formation + holding + 1);
  if (m.usable_periods() < need) {
    throw ValidationError("panel too short: a J=" + std::to_string(formation) + ", K=" +
                          std::to_string(holding) + " sort needs at least " + std::to_string(need) +
                          " usable periods, panel has " + std::to_string(m.usable_periods()));
  }
}

/// Independent sorts on trailing-J return and trailing-J mean turnover,
/// then mean K-period future return per cell.
inline QuadrantTable portfolio_sort(const PanelMatrix& m, const SortSpec& spec) {
  spec.validate();
  require_span(m, spec.formation, spec.holding);
  const auto a = assign_bins(m, spec.formation, spec.return_bins, spec.volume_bins);
  return tabulate(m, a, spec.holding);
}

inline QuadrantTable portfolio_sort(std::span<const PanelRecord> panel, const SortSpec& spec) {
  return portfolio_sort(PanelMatrix(panel), spec);
}

/// Mean winner-minus-loser K-period return, extreme return bins pooled over
/// volume.
inline double momentum_profit(const PanelMatrix& m, std::int64_t formation, std::int64_t holding,
                              std::int64_t return_bins = 2) {
  return portfolio_sort(m, SortSpec{formation, holding, return_bins, 2}).spread;
}

inline double momentum_profit(std::span<const PanelRecord> panel, std::int64_t formation,
                              std::int64_t holding, std::int64_t return_bins = 2) {
  return momentum_profit(PanelMatrix(panel), formation, holding, return_bins);
}

/// Horizons at which low-volume portfolios first beat high-volume ones, on
/// the loser and on the winner side of a 2x2 sort. Empty when the low-volume
/// portfolio never leads within max_holding.
struct LifecycleCrossover {
  std::optional<std::int64_t> loser;
  std::optional<std::int64_t> winner;
};

inline LifecycleCrossover lifecycle_crossover(const PanelMatrix& m, std::int64_t formation,
                                              std::int64_t max_holding) {
  require_span(m, formation, max_holding);
  const auto a = assign_bins(m, formation, 2, 2);
  LifecycleCrossover out;
  for (std::int64_t k = 1; k <= max_holding && !(out.loser && out.winner); ++k) {
    const auto q = tabulate(m, a, k);
    if (!out.loser && q.cell(0, 0) > q.cell(0, 1)) out.loser = k;
    if (!out.winner && q.cell(1, 0) > q.cell(1, 1)) out.winner = k;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Event alignment

/// Mean signed shares per trade class around events, as a fraction of
/// shares outstanding. `large`/`small` are sign-aligned (bad-news events
/// flipped); the good/bad paths are raw.
struct ImbalancePaths {
  std::int64_t window = 0;
  std::vector<std::int64_t> offsets;  // -window .. +window
  std::vector<double> large, small;
  std::vector<double> large_good, small_good, large_bad, small_bad;
  std::size_t events = 0;

  /// First offset >= from at which the series is negative.
  static std::optional<std::int64_t> first_negative(const ImbalancePaths& p,
                                                    const std::vector<double>& series,
                                                    std::int64_t from = 1) {
    for (std::size_t i = 0; i < series.size(); ++i) {
      if (p.offsets[i] >= from && series[i] < 0.0) return p.offsets[i];
    }
    return std::nullopt;
  }

  /// First offset >= from at which the series is negative after having
  /// been positive at some earlier offset >= from: the end of the buying
  /// phase, ignoring any background drift before buying starts.
  static std::optional<std::int64_t> turns_negative(const ImbalancePaths& p,
                                                    const std::vector<double>& series,
                                                    std::int64_t from = 0) {
    bool bought = false;
    for (std::size_t i = 0; i < series.size(); ++i) {
      if (p.offsets[i] < from) continue;
      if (series[i] > 0.0) bought = true;
      else if (bought && series[i] < 0.0) return p.offsets[i];
    }
    return std::nullopt;
  }
};

inline ImbalancePaths event_aligned_imbalance(std::span<const TradeRecord> trades,
                                              std::span<const EventRecord> events,
                                              std::int64_t window, double shares_outstanding) {
  if (events.empty()) throw ValidationError("event_aligned_imbalance: no events to align on");
  if (window < 0) throw ValidationError("event_aligned_imbalance: window must be >= 0");
  if (!(shares_outstanding > 0.0)) {
    throw ValidationError("event_aligned_imbalance: shares outstanding must be > 0");
  }

  struct Net {
    double large = 0.0;
    double small = 0.0;
  };
  std::unordered_map<std::uint64_t, Net> net;
  std::int64_t last_period = -1;
  const auto key = [](std::int64_t period, std::int64_t stock) {
    return (static_cast<std::uint64_t>(period) << 24) ^ static_cast<std::uint64_t>(stock);
  };
  for (const auto& tr : trades) {
    auto& n = net[key(tr.period, tr.stock_id)];
    if (tr.agent_class == TradeClass::newswatcher) n.large += tr.signed_shares;
    if (tr.agent_class == TradeClass::momentum) n.small += tr.signed_shares;
    last_period = std::max(last_period, tr.period);
  }

  ImbalancePaths out;
  out.window = window;
  out.events = events.size();
  const auto width = static_cast<std::size_t>(2 * window + 1);
  for (std::int64_t k = -window; k <= window; ++k) out.offsets.push_back(k);
  for (auto* v : {&out.large, &out.small, &out.large_good, &out.small_good, &out.large_bad,
                  &out.small_bad}) {
    v->assign(width, 0.0);
  }
  std::vector<double> n_all(width, 0.0), n_good(width, 0.0), n_bad(width, 0.0);
  for (const auto& e : events) {
    const double sign = e.jump >= 0.0 ? 1.0 : -1.0;
    for (std::size_t i = 0; i < width; ++i) {
      const std::int64_t period = e.period + out.offsets[i];
      if (period < 0 || (last_period >= 0 && period > last_period)) continue;
      Net n;
      if (auto it = net.find(key(period, e.stock_id)); it != net.end()) n = it->second;
      const double l = n.large / shares_outstanding;
      const double s = n.small / shares_outstanding;
      out.large[i] += sign * l;
      out.small[i] += sign * s;
      n_all[i] += 1.0;
      if (sign > 0) {
        out.large_good[i] += l;
        out.small_good[i] += s;
        n_good[i] += 1.0;
      } else {
        out.large_bad[i] += l;
        out.small_bad[i] += s;
        n_bad[i] += 1.0;
      }
    }
  }
  for (std::size_t i = 0; i < width; ++i) {
    const auto div = [](double& x, double n) { x = n > 0.0 ? x / n : 0.0; };
    div(out.large[i], n_all[i]);
    div(out.small[i], n_all[i]);
    div(out.large_good[i], n_good[i]);
    div(out.small_good[i], n_good[i]);
    div(out.large_bad[i], n_bad[i]);
    div(out.small_bad[i], n_bad[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------

/// Pooled cross-stock Pearson correlation of r_t with r_{t-lag}, using the
/// grand means of each side.
inline double return_autocorrelation(const PanelMatrix& m, std::int64_t lag) {
  if (lag < 1) throw ValidationError("return_autocorrelation: lag must be >= 1");
  const auto l = static_cast<std::size_t>(lag);
  if (m.usable_periods() < l + 2) {
    throw ValidationError("return_autocorrelation: need at least " + std::to_string(l + 2) +
                          " usable periods, panel has " + std::to_string(m.usable_periods()));
  }
  const std::size_t t0 = m.first_usable() + l;
  double sx = 0.0, sy = 0.0;
  std::size_t n = 0;
  for (std::size_t t = t0; t < m.periods(); ++t) {
    for (std::size_t s = 0; s < m.stocks(); ++s) {
      sx += m.ret(t, s);
      sy += m.ret(t - l, s);
      ++n;
    }
  }
  const double mx = sx / static_cast<double>(n);
  const double my = sy / static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t t = t0; t < m.periods(); ++t) {
    for (std::size_t s = 0; s < m.stocks(); ++s) {
      const double dx = m.ret(t, s) - mx;
      const double dy = m.ret(t - l, s) - my;
      sxy += dx * dy;
      sxx += dx * dx;
      syy += dy * dy;
    }
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) {
    throw DomainError("return_autocorrelation: returns have zero variance");
  }
  return sxy / std::sqrt(sxx * syy);
}

inline double return_autocorrelation(std::span<const PanelRecord> panel, std::int64_t lag) {
  return return_autocorrelation(PanelMatrix(panel), lag);
}

}  // namespace infocycle
