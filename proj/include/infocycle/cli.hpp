#pragma once

// Command-line surface. dispatch() parses, runs one command and maps
// failures to exit codes: 0 success, 1 usage or validation error, 2 I/O
// error. Requires CLI11.hpp on the include path.

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "infocycle/analysis.hpp"
#include "infocycle/demos.hpp"
#include "infocycle/entropy.hpp"
#include "infocycle/errors.hpp"
#include "infocycle/io.hpp"
#include "infocycle/market.hpp"

namespace infocycle::cli {

enum ExitCode : int { kOk = 0, kValidation = 1, kIo = 2 };

namespace detail {

/// A list of numbers: rows separated by ';' or newlines, values by ','.
/// A value naming an existing file is read as CSV instead.
inline std::vector<std::vector<double>> parse_matrix(const std::string& arg) {
  std::string text = arg;
  std::string source = "--dist";
  std::error_code ec;
  if (std::filesystem::is_regular_file(arg, ec)) {
    text = io::read_file(arg);
    source = arg;
  }
  std::replace(text.begin(), text.end(), ';', '\n');
  std::vector<std::vector<double>> rows;
  for (const auto& rec : io::parse_csv(text, source)) {
    std::vector<double> row;
    for (const auto& f : rec.fields) {
      auto v = io::parse_double(f);
      if (!v) throw ValidationError(source + ": '" + f + "' is not a number");
      row.push_back(*v);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ValidationError(source + ": no values given");
  return rows;
}

inline Distribution parse_distribution(const std::string& arg) {
  std::vector<double> flat;
  for (const auto& row : parse_matrix(arg)) flat.insert(flat.end(), row.begin(), row.end());
  return Distribution(std::move(flat));
}

inline JointDistribution parse_joint(const std::string& arg) {
  return JointDistribution::from_rows(parse_matrix(arg));
}

inline LogBase parse_base(const std::string& b) {
  if (b == "e") return LogBase::natural();
  if (b == "2") return LogBase::of(2.0);
  throw ValidationError("--base must be 'e' or '2', got '" + b + "'");
}

/// "N..M" with N <= M.
inline std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string& s) {
  const auto dots = s.find("..");
  std::optional<std::uint64_t> lo, hi;
  if (dots != std::string::npos) {
    lo = io::parse_int<std::uint64_t>(std::string_view(s).substr(0, dots));
    hi = io::parse_int<std::uint64_t>(std::string_view(s).substr(dots + 2));
  }
  if (!lo || !hi || *lo > *hi) {
    throw ValidationError("--seeds must look like N..M with N <= M, got '" + s + "'");
  }
  return {*lo, *hi};
}

/// "RxV" bin counts.
inline std::pair<std::int64_t, std::int64_t> parse_bins(const std::string& s) {
  const auto x = s.find_first_of("xX");
  std::optional<std::int64_t> r, v;
  if (x != std::string::npos) {
    r = io::parse_int<std::int64_t>(std::string_view(s).substr(0, x));
    v = io::parse_int<std::int64_t>(std::string_view(s).substr(x + 1));
  }
  if (!r || !v) throw ValidationError("--bins must look like RxV (e.g. 2x2 or 5x3), got '" + s + "'");
  return {*r, *v};
}

/// Prints `body` to `out`, or writes it to dir/name when an output
/// directory was given.
inline void emit(std::ostream& out, const std::string& out_dir, const std::string& name,
                 const std::string& body) {
  if (out_dir.empty()) {
    out << body;
    return;
  }
  io::ensure_directory(out_dir);
  const auto path = std::filesystem::path(out_dir) / name;
  io::write_file(path, body);
  out << "wrote " << path.string() << "\n";
}

inline void run_simulate(const std::string& config_path, const std::string& out_dir,
                         std::optional<std::uint64_t> seed, const std::string& seeds,
                         std::ostream& out) {
  MarketConfig cfg = io::load_config(config_path);
  if (seed) cfg.seed = *seed;

  if (seeds.empty()) {
    const auto result = run_simulation(cfg);
    io::write_run(result, out_dir);
    out << "seed: " << cfg.seed << "\nout: " << out_dir << "\n";
    return;
  }

  // Independent runs, one directory per seed.
  const auto [lo, hi] = parse_seed_range(seeds);
  const std::uint64_t count = hi - lo + 1;
  const auto workers = static_cast<std::uint64_t>(
      std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), 64u)));
  std::atomic<std::uint64_t> next{0};
  std::mutex err_mu;
  std::exception_ptr first_error;
  const auto work = [&] {
    for (std::uint64_t i = next++; i < count; i = next++) {
      try {
        MarketConfig c = cfg;
        c.seed = lo + i;
        io::write_run(run_simulation(c), std::filesystem::path(out_dir) /
                                             ("seed_" + io::format_int(c.seed)));
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::uint64_t w = 1; w < std::min(workers, count); ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
  for (std::uint64_t s = lo; s <= hi; ++s) {
    out << "seed: " << s << "\nout: "
        << (std::filesystem::path(out_dir) / ("seed_" + io::format_int(s))).string() << "\n";
  }
}

inline void print_kahneman(std::ostream& out) {
  const auto d = demos::kahneman_demo();
  out << "threshold: " << io::format_double(d.threshold_days) << " days\n"
      << "pounds_per_day: " << io::format_double(d.pounds_per_day) << "\n";
  for (const auto& p : d.problems) {
    for (const auto& o : p.options) {
      out << o.name << ":";
      for (std::size_t i = 0; i < o.pounds.size(); ++i) {
        out << (i ? "," : "") << " " << io::format_double(o.pounds[i].prob * 100.0) << "% -> "
            << io::format_double(o.pounds[i].value) << " pounds";
      }
      out << " | survival " << io::format_fixed(o.lottery.survival_probability(d.threshold_days), 6)
          << ", expected " << io::format_fixed(o.lottery.expected_value(), 6) << " days\n";
    }
    out << "chosen: " << p.options[p.chosen].name << "\n";
  }
}

inline void print_insider(std::ostream& out) {
  const auto d = demos::insider_demo();
  out << "event_period: " << d.event.period << "\n"
      << "announcement_period: " << d.announcement << "\n"
      << "event_jump: " << io::format_fixed(d.event.jump, 6) << "\n"
      << "baseline_volume: " << io::format_fixed(d.baseline_volume, 1) << "\n"
      << "pre_announcement_volume: " << io::format_fixed(d.pre_volume, 1) << "\n"
      << "pre_announcement_large_imbalance: " << io::format_fixed(d.pre_large, 1) << "\n"
      << "announcement_volume: " << io::format_fixed(d.announcement_volume, 1) << "\n"
      << "post_mean_abs_return: " << io::format_fixed(d.post_mean_abs_return, 6) << "\n\n";
  io::CsvWriter w;
  w.row("period", "price", "return", "volume", "large_imbalance", "small_imbalance");
  const std::int64_t from = d.event.period - 5;
  const std::int64_t to = d.announcement + d.post_periods;
  for (const auto& p : d.path) {
    if (p.period >= from && p.period <= to) w.row(p.period, p.price, p.ret, p.volume, p.large, p.small);
  }
  out << w.str();
}

/// First word that names no subcommand at a level that expects one.
inline std::string unknown_subcommand(CLI::App& app, std::span<const std::string> args) {
  CLI::App* cur = &app;
  for (const auto& a : args) {
    if (a.empty() || a.front() == '-') return {};
    const auto subs = cur->get_subcommands([](CLI::App*) { return true; });
    if (subs.empty()) return {};
    auto it = std::find_if(subs.begin(), subs.end(), [&](CLI::App* s) { return s->get_name() == a; });
    if (it == subs.end()) return a;
    cur = *it;
  }
  return {};
}

}  // namespace detail

/// `args` excludes the program name.
inline int dispatch(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Information-diffusion market simulator and information measures", "infocycle"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(io::kToolVersion));

  // simulate
  std::string config_path, out_dir, seeds;
  std::optional<std::uint64_t> seed;
  auto* simulate = app.add_subcommand("simulate", "Run the market and write panel/trades/events CSVs");
  simulate->add_option("--config", config_path, "key = value config file")->required();
  simulate->add_option("--out", out_dir, "Output directory")->required();
  auto* seed_opt = simulate->add_option("--seed", seed, "Override the config seed");
  simulate->add_option("--seeds", seeds, "Seed batch N..M, one subdirectory per seed")
      ->excludes(seed_opt);

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Diagnostics on simulated or external CSVs");
  analyze->require_subcommand(1);
  std::string panel_path, trades_path, events_path, bins = "2x2", analysis_out;
  std::int64_t formation = 5, holding = 5, window = 0;
  double shares = MarketConfig{}.shares_outstanding;

  auto* momentum = analyze->add_subcommand("momentum", "Winner-minus-loser profit");
  momentum->add_option("--panel", panel_path, "panel.csv")->required();
  momentum->add_option("--formation", formation, "Formation period J")->required();
  momentum->add_option("--holding", holding, "Holding period K")->required();

  auto* lifecycle = analyze->add_subcommand("lifecycle", "Return x volume quadrant table");
  lifecycle->add_option("--panel", panel_path, "panel.csv")->required();
  lifecycle->add_option("--bins", bins, "Return x volume bins, RxV")->capture_default_str();
  lifecycle->add_option("--formation", formation, "Formation period J")->capture_default_str();
  lifecycle->add_option("--holding", holding, "Holding period K")->capture_default_str();
  lifecycle->add_option("--out", analysis_out, "Write quadrant.csv here instead of stdout");

  auto* imbalance = analyze->add_subcommand("imbalance", "Event-aligned order imbalance");
  imbalance->add_option("--trades", trades_path, "trades.csv")->required();
  imbalance->add_option("--events", events_path, "events.csv")->required();
  imbalance->add_option("--window", window, "Offsets -W..W")->required();
  imbalance->add_option("--shares", shares, "Shares outstanding per stock")->capture_default_str();
  imbalance->add_option("--out", analysis_out, "Write imbalance.csv here instead of stdout");

  // info
  auto* info = app.add_subcommand("info", "Information measures of distributions");
  info->require_subcommand(1);
  std::string dist, dist2, base = "e";
  const auto add_info = [&](const char* name, const char* desc, bool needs_q) {
    auto* c = info->add_subcommand(name, desc);
    c->add_option("--dist", dist, "Values as a,b,c (rows split by ';') or a CSV file")->required();
    auto* d2 = c->add_option("--dist2", dist2, "Model distribution q");
    if (needs_q) d2->required();
    c->add_option("--base", base, "Logarithm base: e or 2")->capture_default_str();
    return c;
  };
  auto* entropy_cmd = add_info("entropy", "H(p)", false);
  auto* cross_cmd = add_info("cross-entropy", "H(p, q)", true);
  auto* mutual_cmd = add_info("mutual", "R = H(x) - H(x|y) of a joint table", false);

  // demo
  auto* demo = app.add_subcommand("demo", "Embedded scenarios");
  demo->require_subcommand(1);
  auto* kahneman = demo->add_subcommand("kahneman", "Survival-threshold lottery choices");
  auto* insider = demo->add_subcommand("insider", "Informed buying before a public jump");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << io::kToolVersion << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    const auto unknown = detail::unknown_subcommand(app, args);
    err << "error: " << (unknown.empty() ? std::string(e.what()) : "unknown subcommand '" + unknown + "'")
        << "\n\n" << app.help("", CLI::AppFormatMode::All);
    return kValidation;
  }

  try {
    if (simulate->parsed()) {
      detail::run_simulate(config_path, out_dir, seed, seeds, out);
    } else if (momentum->parsed()) {
      const auto panel = io::read_panel(panel_path);
      const auto q = portfolio_sort(PanelMatrix(panel), SortSpec{formation, holding, 2, 2});
      out << "formation: " << formation << "\nholding: " << holding
          << "\nwinner_minus_loser: " << io::format_real(q.spread)
          << "\nformation_dates: " << q.dates << "\n";
    } else if (lifecycle->parsed()) {
      const auto [r, v] = detail::parse_bins(bins);
      const auto panel = io::read_panel(panel_path);
      const auto q = portfolio_sort(PanelMatrix(panel), SortSpec{formation, holding, r, v});
      detail::emit(out, analysis_out, "quadrant.csv", io::quadrant_csv(q));
    } else if (imbalance->parsed()) {
      const auto trades = io::read_trades(trades_path);
      const auto events = io::read_events(events_path);
      const auto p = event_aligned_imbalance(trades, events, window, shares);
      detail::emit(out, analysis_out, "imbalance.csv", io::imbalance_csv(p));
    } else if (entropy_cmd->parsed()) {
      if (!dist2.empty()) throw ValidationError("entropy takes a single --dist");
      out << io::format_fixed(entropy(detail::parse_distribution(dist), detail::parse_base(base)), 6)
          << "\n";
    } else if (cross_cmd->parsed()) {
      out << io::format_fixed(cross_entropy(detail::parse_distribution(dist),
                                            detail::parse_distribution(dist2),
                                            detail::parse_base(base)),
                              6)
          << "\n";
    } else if (mutual_cmd->parsed()) {
      if (!dist2.empty()) throw ValidationError("mutual takes a single joint table in --dist");
      out << io::format_fixed(received_information(detail::parse_joint(dist), detail::parse_base(base)), 6)
          << "\n";
    } else if (kahneman->parsed()) {
      detail::print_kahneman(out);
    } else if (insider->parsed()) {
      detail::print_insider(out);
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const std::logic_error& e) {  // validation, domain and infinite-divergence errors
    err << "error: " << e.what() << "\n";
    return kValidation;
  }
  return kOk;
}

inline int dispatch(int argc, const char* const* argv, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return dispatch(args, out, err);
}

}  // namespace infocycle::cli
