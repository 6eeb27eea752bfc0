#pragma once

// Files in and out: the flat key = value config format, RFC-4180 CSV for
// panels, trades, events and analysis tables, and the run manifest.
//
// Numbers are written with std::to_chars (shortest round-trip form) and read
// with std::from_chars, so output never depends on the process locale and a
// written panel reads back to the same doubles.
//
// sha256_hex needs libcrypto at link time.

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <type_traits>
#include <utility>
#include <vector>

#include "infocycle/analysis.hpp"
#include "infocycle/errors.hpp"
#include "infocycle/market.hpp"
#include "infocycle/market_config.hpp"

namespace infocycle::io {

inline constexpr std::string_view kToolName = "infocycle";
inline constexpr std::string_view kToolVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Numbers

inline std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

/// Nine significant digits, %g style; the precision used for every real in
/// the CSV outputs.
inline constexpr int kCsvDigits = 9;

inline std::string format_real(double v) {
  std::array<char, 64> buf{};
  const auto res =
      std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, kCsvDigits);
  return std::string(buf.data(), res.ptr);
}

/// Fixed-point with `digits` decimals, for human-facing output.
inline std::string format_fixed(double v, int digits) {
  std::array<char, 128> buf{};
  const auto res =
      std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, digits);
  if (res.ec != std::errc()) return format_double(v);
  return std::string(buf.data(), res.ptr);
}

template <class Int>
std::string format_int(Int v) {
  static_assert(std::is_integral_v<Int>);
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

namespace detail {

inline std::string_view strip_plus(std::string_view s) {
  if (s.size() > 1 && s.front() == '+' && s[1] != '-') s.remove_prefix(1);
  return s;
}

}  // namespace detail

/// Whole-string numeric parses; nullopt on junk, overflow or non-finite.
inline std::optional<double> parse_double(std::string_view s) {
  s = detail::strip_plus(trim(s));
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

template <class Int>
std::optional<Int> parse_int(std::string_view s) {
  s = detail::strip_plus(trim(s));
  if (s.empty()) return std::nullopt;
  Int v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::optional<bool> parse_bool(std::string_view s) {
  s = trim(s);
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Files

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("error while reading '" + path.string() + "'");
  return data;
}

inline void write_file(const std::filesystem::path& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  out.flush();
  if (!out) throw IoError("error while writing '" + path.string() + "'");
}

inline void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw IoError("cannot create output directory '" + dir.string() + "'");
  }
}

inline std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw IoError("sha256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[md[i] >> 4]);
    out.push_back(kHex[md[i] & 0xF]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV

inline std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

class CsvWriter {
 public:
  template <class... Fields>
  void row(const Fields&... fields) {
    bool first = true;
    ((append(first, fields)), ...);
    out_.push_back('\n');
  }

  template <class Str>
  void row_of(std::span<const Str> fields) {
    bool first = true;
    for (const auto& f : fields) append(first, std::string_view(f));
    out_.push_back('\n');
  }

  const std::string& str() const noexcept { return out_; }
  std::string take() && { return std::move(out_); }

 private:
  void sep(bool& first) {
    if (!first) out_.push_back(',');
    first = false;
  }
  void append(bool& first, std::string_view s) {
    sep(first);
    out_ += csv_escape(s);
  }
  void append(bool& first, const std::string& s) { append(first, std::string_view(s)); }
  void append(bool& first, const char* s) { append(first, std::string_view(s)); }
  void append(bool& first, double v) {
    sep(first);
    out_ += format_real(v);
  }
  void append(bool& first, std::int64_t v) {
    sep(first);
    out_ += format_int(v);
  }
  void append(bool& first, std::size_t v) {
    sep(first);
    out_ += format_int(v);
  }

  std::string out_;
};

struct CsvRecord {
  std::size_t line = 0;  // 1-based line where the record starts
  std::vector<std::string> fields;
};

/// RFC-4180 reader. Accepts LF or CRLF endings, quoted fields with embedded
/// separators, doubled quotes and newlines. Blank lines are skipped.
inline std::vector<CsvRecord> parse_csv(std::string_view text, std::string_view source) {
  std::vector<CsvRecord> records;
  CsvRecord rec;
  std::string field;
  std::size_t line = 1;
  rec.line = 1;
  bool in_quotes = false;
  bool field_started = false;  // anything seen for the current record
  bool was_quoted = false;

  const auto end_field = [&] {
    rec.fields.push_back(std::move(field));
    field.clear();
    was_quoted = false;
  };
  const auto end_record = [&] {
    if (field_started) {
      end_field();
      records.push_back(std::move(rec));
    }
    rec = CsvRecord{};
    field_started = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty() || was_quoted) {
          throw ValidationError(std::string(source) + " line " + std::to_string(line) +
                                ": stray quote inside an unquoted field");
        }
        if (!field_started) rec.line = line;
        in_quotes = true;
        was_quoted = true;
        field_started = true;
        break;
      case ',':
        if (!field_started) rec.line = line;
        field_started = true;
        end_field();
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') break;
        [[fallthrough]];
      case '\n':
        end_record();
        ++line;
        rec.line = line;
        break;
      default:
        if (was_quoted) {
          throw ValidationError(std::string(source) + " line " + std::to_string(line) +
                                ": text after a closing quote");
        }
        if (!field_started) rec.line = line;
        field_started = true;
        field.push_back(c);
    }
  }
  if (in_quotes) {
    throw ValidationError(std::string(source) + ": unterminated quoted field starting on line " +
                          std::to_string(rec.line));
  }
  end_record();
  return records;
}

namespace detail {

/// Column lookup by header name; extra columns are ignored.
class CsvColumns {
 public:
  CsvColumns(const std::vector<CsvRecord>& records, std::span<const std::string_view> required,
             std::string_view source)
      : source_(source) {
    if (records.empty()) throw ValidationError(std::string(source) + ": file is empty");
    const auto& header = records.front().fields;
    for (auto name : required) {
      auto it = std::find_if(header.begin(), header.end(),
                             [&](const std::string& h) { return trim(h) == name; });
      if (it == header.end()) {
        throw ValidationError(std::string(source) + ": missing column '" + std::string(name) + "'");
      }
      index_[std::string(name)] = static_cast<std::size_t>(it - header.begin());
    }
    width_ = header.size();
  }

  std::string_view raw(const CsvRecord& r, std::string_view name) const {
    if (r.fields.size() != width_) {
      throw ValidationError(where(r) + ": expected " + std::to_string(width_) + " fields, found " +
                            std::to_string(r.fields.size()));
    }
    return r.fields[index_.at(std::string(name))];
  }

  double real(const CsvRecord& r, std::string_view name) const {
    auto s = raw(r, name);
    auto v = parse_double(s);
    if (!v) throw bad(r, name, s, "a finite number");
    return *v;
  }

  std::int64_t integer(const CsvRecord& r, std::string_view name) const {
    auto s = raw(r, name);
    auto v = parse_int<std::int64_t>(s);
    if (!v) throw bad(r, name, s, "an integer");
    return *v;
  }

  std::string where(const CsvRecord& r) const {
    return std::string(source_) + " line " + std::to_string(r.line);
  }

  ValidationError bad(const CsvRecord& r, std::string_view name, std::string_view got,
                      std::string_view want) const {
    return ValidationError(where(r) + ": column '" + std::string(name) + "' must be " +
                           std::string(want) + ", got '" + std::string(got) + "'");
  }

 private:
  std::string_view source_;
  std::map<std::string, std::size_t> index_;
  std::size_t width_ = 0;
};

}  // namespace detail

inline constexpr std::array<std::string_view, 8> kPanelColumns = {
    "period", "stock_id", "price", "return", "volume", "turnover", "fundamental", "frac_informed"};
inline constexpr std::array<std::string_view, 5> kTradeColumns = {
    "period", "stock_id", "agent_class", "signed_shares", "fill_price"};
inline constexpr std::array<std::string_view, 3> kEventColumns = {"period", "stock_id", "jump"};

inline std::string panel_csv(std::span<const PanelRecord> panel) {
  CsvWriter w;
  w.row_of(std::span<const std::string_view>(kPanelColumns));
  for (const auto& r : panel) {
    w.row(r.period, r.stock_id, r.price, r.ret, r.volume, r.turnover, r.fundamental,
          r.frac_informed);
  }
  return std::move(w).take();
}

inline std::string trades_csv(std::span<const TradeRecord> trades) {
  CsvWriter w;
  w.row_of(std::span<const std::string_view>(kTradeColumns));
  for (const auto& t : trades) {
    w.row(t.period, t.stock_id, to_string(t.agent_class), t.signed_shares, t.fill_price);
  }
  return std::move(w).take();
}

inline std::string events_csv(std::span<const EventRecord> events) {
  CsvWriter w;
  w.row_of(std::span<const std::string_view>(kEventColumns));
  for (const auto& e : events) w.row(e.period, e.stock_id, e.jump);
  return std::move(w).take();
}

/// Rows are return bins (0 = losers), columns are volume bins (0 = lowest).
inline std::string quadrant_csv(const QuadrantTable& q) {
  CsvWriter w;
  std::vector<std::string> header{"return_bin"};
  for (std::size_t v = 0; v < q.volume_bins; ++v) header.push_back("volume_bin_" + format_int(v));
  w.row_of(std::span<const std::string>(header));
  for (std::size_t r = 0; r < q.return_bins; ++r) {
    std::vector<std::string> row{format_int(r)};
    for (std::size_t v = 0; v < q.volume_bins; ++v) row.push_back(format_real(q.cell(r, v)));
    w.row_of(std::span<const std::string>(row));
  }
  return std::move(w).take();
}

inline std::string imbalance_csv(const ImbalancePaths& p) {
  CsvWriter w;
  w.row("offset", "large_mean", "small_mean");
  for (std::size_t i = 0; i < p.offsets.size(); ++i) w.row(p.offsets[i], p.large[i], p.small[i]);
  return std::move(w).take();
}

inline std::vector<PanelRecord> parse_panel_csv(std::string_view text, std::string_view source) {
  const auto records = parse_csv(text, source);
  const detail::CsvColumns cols(records, kPanelColumns, source);
  std::vector<PanelRecord> out;
  out.reserve(records.size() - 1);
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& r = records[i];
    PanelRecord p;
    p.period = cols.integer(r, "period");
    p.stock_id = cols.integer(r, "stock_id");
    p.price = cols.real(r, "price");
    p.ret = cols.real(r, "return");
    p.volume = cols.real(r, "volume");
    p.turnover = cols.real(r, "turnover");
    p.fundamental = cols.real(r, "fundamental");
    p.frac_informed = cols.real(r, "frac_informed");
    if (!(p.price > 0.0)) throw cols.bad(r, "price", cols.raw(r, "price"), "> 0");
    out.push_back(p);
  }
  return out;
}

/// Trade classes by name; the size-class aliases large/small are accepted
/// for externally produced files.
inline std::optional<TradeClass> parse_trade_class(std::string_view s) {
  s = trim(s);
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "newswatcher" || lower == "large") return TradeClass::newswatcher;
  if (lower == "momentum" || lower == "small") return TradeClass::momentum;
  if (lower == "liquidity") return TradeClass::liquidity;
  return std::nullopt;
}

inline std::vector<TradeRecord> parse_trades_csv(std::string_view text, std::string_view source) {
  const auto records = parse_csv(text, source);
  const detail::CsvColumns cols(records, kTradeColumns, source);
  std::vector<TradeRecord> out;
  out.reserve(records.size() - 1);
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& r = records[i];
    TradeRecord t;
    t.period = cols.integer(r, "period");
    t.stock_id = cols.integer(r, "stock_id");
    const auto cls_text = cols.raw(r, "agent_class");
    const auto cls = parse_trade_class(cls_text);
    if (!cls) {
      throw cols.bad(r, "agent_class", cls_text, "one of newswatcher, momentum, liquidity");
    }
    t.agent_class = *cls;
    t.signed_shares = cols.real(r, "signed_shares");
    t.fill_price = cols.real(r, "fill_price");
    out.push_back(t);
  }
  return out;
}

inline std::vector<EventRecord> parse_events_csv(std::string_view text, std::string_view source) {
  const auto records = parse_csv(text, source);
  const detail::CsvColumns cols(records, kEventColumns, source);
  std::vector<EventRecord> out;
  out.reserve(records.size() - 1);
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& r = records[i];
    EventRecord e;
    e.period = cols.integer(r, "period");
    e.stock_id = cols.integer(r, "stock_id");
    e.jump = cols.real(r, "jump");
    if (!(e.jump > -1.0)) throw cols.bad(r, "jump", cols.raw(r, "jump"), "> -1");
    out.push_back(e);
  }
  return out;
}

inline std::vector<PanelRecord> read_panel(const std::filesystem::path& path) {
  return parse_panel_csv(read_file(path), path.string());
}
inline std::vector<TradeRecord> read_trades(const std::filesystem::path& path) {
  return parse_trades_csv(read_file(path), path.string());
}
inline std::vector<EventRecord> read_events(const std::filesystem::path& path) {
  return parse_events_csv(read_file(path), path.string());
}

// ---------------------------------------------------------------------------
// Config

inline std::string config_value(const MarketConfig& cfg, const ConfigField& f) {
  return std::visit(
      [&](auto member) -> std::string {
        const auto& v = cfg.*member;
        using T = std::remove_cvref_t<decltype(v)>;
        if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else if constexpr (std::is_same_v<T, double>) {
          return format_double(v);
        } else {
          return format_int(v);
        }
      },
      f.member);
}

/// Every field as `key = value`, in declaration order. Parses back to an
/// identical config.
inline std::string render_config(const MarketConfig& cfg) {
  std::string out;
  for (const auto& f : kConfigFields) {
    out += f.key;
    out += " = ";
    out += config_value(cfg, f);
    out += '\n';
  }
  return out;
}

/// Parses `key = value` lines; `#` starts a comment. Optional keys keep the
/// defaults in MarketConfig. Errors name the key and the line.
inline MarketConfig parse_config(std::string_view text, std::string_view source = "config") {
  MarketConfig cfg;
  std::map<std::string, std::size_t, std::less<>> seen;  // key -> line
  const std::string src(source);

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    const std::string at = src + " line " + std::to_string(line_no);

    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ValidationError(at + ": expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw ValidationError(at + ": missing key before '='");

    const auto* field = std::find_if(kConfigFields.begin(), kConfigFields.end(),
                                     [&](const ConfigField& f) { return f.key == key; });
    if (field == kConfigFields.end()) {
      throw ValidationError(at + ": unknown config key '" + std::string(key) + "'");
    }
    if (auto it = seen.find(key); it != seen.end()) {
      throw ValidationError(src + ": config key '" + std::string(key) + "' is set on line " +
                            std::to_string(it->second) + " and again on line " +
                            std::to_string(line_no));
    }
    seen.emplace(std::string(key), line_no);
    if (value.empty()) {
      throw ValidationError(at + ": config key '" + std::string(key) + "' has no value");
    }

    std::visit(
        [&](auto member) {
          auto& dst = cfg.*member;
          using T = std::remove_cvref_t<decltype(dst)>;
          std::optional<T> parsed;
          std::string_view want;
          if constexpr (std::is_same_v<T, bool>) {
            parsed = parse_bool(value);
            want = "true or false";
          } else if constexpr (std::is_same_v<T, double>) {
            parsed = parse_double(value);
            want = "a finite number";
          } else if constexpr (std::is_same_v<T, std::uint64_t>) {
            parsed = parse_int<T>(value);
            want = "a non-negative integer";
          } else {
            parsed = parse_int<T>(value);
            want = "an integer";
          }
          if (!parsed) {
            throw ValidationError(at + ": config key '" + std::string(key) + "' must be " +
                                  std::string(want) + ", got '" + std::string(value) + "'");
          }
          dst = *parsed;
        },
        field->member);
  }

  for (const auto& f : kConfigFields) {
    if (f.required && !seen.contains(f.key)) {
      throw ValidationError(src + ": missing required config key '" + std::string(f.key) + "'");
    }
  }

  try {
    cfg.validate();
  } catch (const ConfigKeyError& e) {
    auto it = seen.find(e.key());
    const std::string at = it != seen.end() ? src + " line " + std::to_string(it->second)
                                            : src + " (default value)";
    throw ValidationError(at + ": " + e.what());
  }
  return cfg;
}

inline MarketConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_file(path), path.string());
}

// ---------------------------------------------------------------------------
// Run output

struct RunManifest {
  MarketConfig config;
  std::uint64_t seed = 0;
  std::string tool_version{kToolVersion};
  std::vector<std::pair<std::string, std::string>> digests;  // file name -> sha256

  std::string render() const {
    std::string out;
    out += "tool: ";
    out += kToolName;
    out += "\nversion: " + tool_version;
    out += "\nseed: " + format_int(seed) + "\n";
    for (const auto& f : kConfigFields) {
      out += "config.";
      out += f.key;
      out += ": " + config_value(config, f) + "\n";
    }
    for (const auto& [name, digest] : digests) out += "sha256." + name + ": " + digest + "\n";
    return out;
  }
};

/// Writes panel.csv, trades.csv, events.csv and manifest.txt into `dir`.
inline RunManifest write_run(const SimulationResult& result, const std::filesystem::path& dir) {
  ensure_directory(dir);
  RunManifest m;
  m.config = result.config;
  m.seed = result.config.seed;
  const std::pair<std::string, std::string> files[] = {
      {"panel.csv", panel_csv(result.panel)},
      {"trades.csv", trades_csv(result.trades)},
      {"events.csv", events_csv(result.events)},
  };
  for (const auto& [name, body] : files) {
    write_file(dir / name, body);
    m.digests.emplace_back(name, sha256_hex(body));
  }
  write_file(dir / "manifest.txt", m.render());
  return m;
}

}  // namespace infocycle::io
