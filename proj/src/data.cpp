// SPDX-License-Identifier: Apache-2.0
#include "windcast/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <unordered_map>

#include "windcast/csv.hpp"
#include "windcast/error.hpp"

namespace windcast {

namespace {

using namespace std::chrono;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool is_letter(char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z'); }

template <typename Int>
bool parse_int(std::string_view s, Int& out) {
  if (s.empty()) return false;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

bool in_physical_range(Feature f, double v) {
  switch (f) {
    case Feature::RelativeHumidity:
      return v >= 0.0 && v <= 100.0;
    case Feature::WindDirection:
      return v >= 0.0 && v <= 360.0;
    case Feature::WindSpeed:
    case Feature::Visibility:
    case Feature::SeaLevelPressure:
    case Feature::StationPressure:
      return v >= 0.0;
    default:
      return true;
  }
}

bool is_summary_report(std::string_view report_type) {
  const auto t = trim(report_type);
  return t == "SOD" || t == "SOM";
}

}  // namespace

std::optional<Timestamp> parse_timestamp(std::string_view text) {
  text = trim(text);
  // YYYY-MM-DDTHH:MM[:SS]
  if (text.size() != 16 && text.size() != 19) return std::nullopt;
  if (text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != ' ') || text[13] != ':') {
    return std::nullopt;
  }
  int y = 0;
  unsigned mo = 0, d = 0, h = 0, mi = 0, s = 0;
  if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), mo) ||
      !parse_int(text.substr(8, 2), d) || !parse_int(text.substr(11, 2), h) ||
      !parse_int(text.substr(14, 2), mi)) {
    return std::nullopt;
  }
  if (text.size() == 19 && (text[16] != ':' || !parse_int(text.substr(17, 2), s))) {
    return std::nullopt;
  }
  const year_month_day ymd{year{y}, month{mo}, day{d}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 59) return std::nullopt;
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
}

std::string format_timestamp(Timestamp t) {
  const auto day_start = floor<days>(t);
  const year_month_day ymd{day_start};
  const hh_mm_ss<seconds> tod{t - day_start};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(tod.hours().count()), static_cast<int>(tod.minutes().count()),
                static_cast<int>(tod.seconds().count()));
  return buf;
}

std::optional<double> parse_lcd_value(std::string_view raw) {
  std::string_view s = trim(raw);
  if (s.empty() || s == "*" || s == "VRB") return std::nullopt;
  while (!s.empty() && (is_letter(s.back()) || s.back() == '*')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

ParseResult parse_lcd_csv(std::istream& in) {
  CsvReader reader(in);
  const auto header = reader.next();
  if (!header) throw FormatError("LCD file is empty (no header row)");

  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < header->size(); ++i) index.emplace(std::string(trim((*header)[i])), i);

  std::vector<std::string> missing;
  auto require = [&](std::string_view name) -> std::size_t {
    const auto it = index.find(std::string(name));
    if (it == index.end()) {
      missing.emplace_back(name);
      return 0;
    }
    return it->second;
  };
  const std::size_t date_col = require("DATE");
  std::array<std::size_t, kFeatureCount> feature_cols{};
  for (std::size_t f = 0; f < kFeatureCount; ++f) feature_cols[f] = require(kLcdColumns[f]);
  if (!missing.empty()) {
    std::string msg = "LCD file is missing required header";
    msg += missing.size() > 1 ? "s" : "";
    for (std::size_t i = 0; i < missing.size(); ++i) msg += (i == 0 ? " " : ", ") + missing[i];
    throw FormatError(msg);
  }
  const auto report_it = index.find("REPORT_TYPE");
  const std::optional<std::size_t> report_col =
      report_it == index.end() ? std::nullopt : std::optional<std::size_t>(report_it->second);

  ParseResult result;
  std::optional<Timestamp> last;
  while (auto row = reader.next()) {
    const std::size_t line = reader.line();
    if (row->size() < header->size()) {
      result.errors.push_back({line, "expected " + std::to_string(header->size()) +
                                         " fields, found " + std::to_string(row->size())});
      continue;
    }
    if (report_col && is_summary_report((*row)[*report_col])) {
      ++result.non_hourly_rows;
      continue;
    }

    HourlyRecord rec;
    bool any_value = false;
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      const std::string_view raw = (*row)[feature_cols[f]];
      if (!trim(raw).empty()) any_value = true;
      auto v = parse_lcd_value(raw);
      if (v && !in_physical_range(static_cast<Feature>(f), *v)) {
        ++result.out_of_range_values;
        v.reset();
      }
      rec.values[f] = v;
    }
    if (!any_value) {
      ++result.non_hourly_rows;
      continue;
    }

    const auto ts = parse_timestamp((*row)[date_col]);
    if (!ts) {
      result.errors.push_back({line, "unparseable timestamp \"" + (*row)[date_col] + "\""});
      continue;
    }
    if (last && *ts <= *last) {
      result.errors.push_back({line, "timestamp " + format_timestamp(*ts) +
                                         " does not follow " + format_timestamp(*last)});
      continue;
    }
    rec.timestamp = *ts;
    last = *ts;
    result.records.push_back(rec);
  }
  return result;
}

ParseResult parse_lcd_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open LCD file " + path.string());
  return parse_lcd_csv(in);
}

void write_lcd_csv(std::span<const HourlyRecord> records, std::ostream& out) {
  std::vector<std::string> header{"DATE"};
  header.insert(header.end(), kLcdColumns.begin(), kLcdColumns.end());
  out << csv_row(header) << '\n';
  for (const auto& rec : records) {
    std::vector<std::string> fields{format_timestamp(rec.timestamp)};
    for (const auto& v : rec.values) fields.push_back(v ? format_double(*v) : "");
    out << csv_row(fields) << '\n';
  }
}

CleanDataset CleanDataset::slice(std::size_t first, std::size_t last) const {
  if (first >= last || last > rows()) {
    throw DimensionError("slice [" + std::to_string(first) + ", " + std::to_string(last) +
                         ") out of range for " + std::to_string(rows()) + " rows");
  }
  CleanDataset out;
  out.columns = columns;
  out.target_column = target_column;
  out.timestamps.assign(timestamps.begin() + static_cast<std::ptrdiff_t>(first),
                        timestamps.begin() + static_cast<std::ptrdiff_t>(last));
  const std::size_t width = values.cols();
  const auto src = values.data();
  out.values = Tensor2(last - first, width,
                       std::vector<double>(src.begin() + static_cast<std::ptrdiff_t>(first * width),
                                           src.begin() + static_cast<std::ptrdiff_t>(last * width)));
  out.provenance = provenance;
  return out;
}

CleanDataset clean(std::span<const HourlyRecord> records) {
  if (records.empty()) throw DataError("clean: no records");

  Provenance prov;
  prov.input_records = records.size();
  prov.imputed.assign(kFeatureCount, 0);

  // One report per hour, first wins.
  std::vector<HourlyRecord> hourly;
  for (const auto& rec : records) {
    const Timestamp hour = floor<hours>(rec.timestamp);
    if (!hourly.empty()) {
      if (hour < hourly.back().timestamp) {
        throw DataError("clean: records are not in chronological order at " +
                        format_timestamp(rec.timestamp));
      }
      if (hour == hourly.back().timestamp) {
        ++prov.duplicates_dropped;
        continue;
      }
    }
    HourlyRecord r = rec;
    r.timestamp = hour;
    hourly.push_back(r);
  }

  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    const bool present = std::any_of(hourly.begin(), hourly.end(),
                                     [&](const HourlyRecord& r) { return r.values[f].has_value(); });
    if (!present) throw DataError("feature " + std::string(kLcdColumns[f]) + " has no values");
  }

  // Fill absent hours with all-missing rows.
  std::vector<HourlyRecord> contiguous;
  contiguous.reserve(hourly.size());
  for (const auto& r : hourly) {
    if (!contiguous.empty()) {
      for (Timestamp t = contiguous.back().timestamp + hours{1}; t < r.timestamp; t += hours{1}) {
        HourlyRecord gap;
        gap.timestamp = t;
        contiguous.push_back(gap);
        ++prov.hours_inserted;
      }
    }
    contiguous.push_back(r);
  }

  const auto complete = [](const HourlyRecord& r) {
    return std::all_of(r.values.begin(), r.values.end(), [](const auto& v) { return v.has_value(); });
  };
  const auto first_complete = std::find_if(contiguous.begin(), contiguous.end(), complete);
  if (first_complete == contiguous.end()) {
    throw DataError("clean: no hour has all nine features present");
  }
  prov.leading_rows_dropped = static_cast<std::size_t>(first_complete - contiguous.begin());

  CleanDataset ds;
  ds.columns.assign(kLcdColumns.begin(), kLcdColumns.end());
  ds.target_column = kWindSpeedColumn;
  const std::size_t n = static_cast<std::size_t>(contiguous.end() - first_complete);
  ds.values = Tensor2(n, kFeatureCount);
  std::array<double, kFeatureCount> carried{};
  for (std::size_t i = 0; i < n; ++i) {
    const HourlyRecord& r = *(first_complete + static_cast<std::ptrdiff_t>(i));
    ds.timestamps.push_back(r.timestamp);
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      if (r.values[f]) {
        carried[f] = *r.values[f];
      } else {
        ++prov.imputed[f];
      }
      ds.values(i, f) = carried[f];
    }
  }
  ds.provenance = std::move(prov);
  return ds;
}

CleanDataset encode_wind_direction_cyclic(const CleanDataset& ds) {
  const std::string_view name = kLcdColumns[static_cast<std::size_t>(Feature::WindDirection)];
  const auto it = std::find(ds.columns.begin(), ds.columns.end(), name);
  if (it == ds.columns.end()) throw DataError("cyclic wind direction: dataset has no " + std::string(name) + " column");
  const std::size_t dir = static_cast<std::size_t>(it - ds.columns.begin());

  CleanDataset out;
  out.timestamps = ds.timestamps;
  out.provenance = ds.provenance;
  out.target_column = ds.target_column > dir ? ds.target_column + 1 : ds.target_column;
  out.values = Tensor2(ds.rows(), ds.values.cols() + 1);
  for (std::size_t c = 0; c < ds.columns.size(); ++c) {
    if (c == dir) {
      out.columns.push_back(std::string(name) + "Sin");
      out.columns.push_back(std::string(name) + "Cos");
    } else {
      out.columns.push_back(ds.columns[c]);
    }
  }
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    std::size_t o = 0;
    for (std::size_t c = 0; c < ds.values.cols(); ++c) {
      if (c == dir) {
        const double rad = ds.values(i, c) * std::numbers::pi / 180.0;
        out.values(i, o++) = std::sin(rad);
        out.values(i, o++) = std::cos(rad);
      } else {
        out.values(i, o++) = ds.values(i, c);
      }
    }
  }
  return out;
}

std::vector<HourlyRecord> to_records(const CleanDataset& ds) {
  if (ds.values.cols() != kFeatureCount) {
    throw DimensionError("to_records: dataset has " + std::to_string(ds.values.cols()) +
                         " columns, expected " + std::to_string(kFeatureCount));
  }
  std::vector<HourlyRecord> out(ds.rows());
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    out[i].timestamp = ds.timestamps[i];
    for (std::size_t f = 0; f < kFeatureCount; ++f) out[i].values[f] = ds.values(i, f);
  }
  return out;
}

std::pair<CleanDataset, CleanDataset> split(const CleanDataset& ds, double ratio,
                                            std::size_t lookback) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw ConfigError("train ratio must lie strictly between 0 and 1, got " + format_double(ratio));
  }
  const std::size_t n = ds.rows();
  const auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(n) * ratio));
  const std::size_t need = lookback + 1;
  if (n_train < need || n - n_train < need) {
    throw ConfigError("split of " + std::to_string(n) + " rows at ratio " + format_double(ratio) +
                      " gives " + std::to_string(n_train) + "/" + std::to_string(n - n_train) +
                      " rows; each side needs at least lookback + 1 = " + std::to_string(need));
  }
  return {ds.slice(0, n_train), ds.slice(n_train, n)};
}

Scaler Scaler::fit(const CleanDataset& train) {
  Scaler s;
  const std::size_t width = train.values.cols();
  s.mins_.assign(width, 0.0);
  s.maxs_.assign(width, 0.0);
  for (std::size_t c = 0; c < width; ++c) {
    double lo = train.values(0, c), hi = lo;
    for (std::size_t r = 1; r < train.values.rows(); ++r) {
      lo = std::min(lo, train.values(r, c));
      hi = std::max(hi, train.values(r, c));
    }
    if (!(hi > lo)) {
      const std::string name = c < train.columns.size() ? train.columns[c] : std::to_string(c);
      throw DataError("feature " + name + " is constant (" + format_double(lo) +
                      ") over the training split and cannot be scaled");
    }
    s.mins_[c] = lo;
    s.maxs_[c] = hi;
  }
  return s;
}

double Scaler::transform_value(std::size_t column, double v) const {
  return (v - mins_.at(column)) / (maxs_.at(column) - mins_.at(column));
}

double Scaler::inverse_value(std::size_t column, double v) const {
  return v * (maxs_.at(column) - mins_.at(column)) + mins_.at(column);
}

CleanDataset Scaler::apply(const CleanDataset& ds) const {
  if (ds.values.cols() != mins_.size()) {
    throw DimensionError("scaler fitted on " + std::to_string(mins_.size()) +
                         " columns applied to " + std::to_string(ds.values.cols()));
  }
  CleanDataset out = ds;
  for (std::size_t r = 0; r < out.values.rows(); ++r) {
    for (std::size_t c = 0; c < out.values.cols(); ++c) {
      out.values(r, c) = transform_value(c, ds.values(r, c));
    }
  }
  return out;
}

CleanDataset Scaler::inverse(const CleanDataset& ds) const {
  if (ds.values.cols() != mins_.size()) {
    throw DimensionError("scaler fitted on " + std::to_string(mins_.size()) +
                         " columns applied to " + std::to_string(ds.values.cols()));
  }
  CleanDataset out = ds;
  for (std::size_t r = 0; r < out.values.rows(); ++r) {
    for (std::size_t c = 0; c < out.values.cols(); ++c) {
      out.values(r, c) = inverse_value(c, ds.values(r, c));
    }
  }
  return out;
}

std::vector<Window> make_windows(const CleanDataset& ds, std::size_t lookback) {
  if (lookback == 0) throw ConfigError("lookback must be >= 1");
  if (ds.rows() < lookback + 1) {
    throw ConfigError("dataset has " + std::to_string(ds.rows()) +
                      " rows; windows of lookback " + std::to_string(lookback) + " need at least " +
                      std::to_string(lookback + 1));
  }
  const std::size_t width = ds.values.cols();
  const auto src = ds.values.data();
  std::vector<Window> windows;
  windows.reserve(ds.rows() - lookback);
  for (std::size_t i = 0; i + lookback < ds.rows(); ++i) {
    Window w;
    const auto first = src.begin() + static_cast<std::ptrdiff_t>(i * width);
    w.features = Tensor2(lookback, width,
                         std::vector<double>(first, first + static_cast<std::ptrdiff_t>(lookback * width)));
    w.target = ds.values(i + lookback, ds.target_column);
    w.target_time = ds.timestamps[i + lookback];
    windows.push_back(std::move(w));
  }
  return windows;
}

CleanDataset sine_dataset(std::size_t samples, double period) {
  if (samples == 0) throw ConfigError("sine dataset needs at least one sample");
  if (!(period > 0.0)) throw ConfigError("sine period must be > 0");
  CleanDataset ds;
  ds.columns = {"sine"};
  ds.target_column = 0;
  ds.values = Tensor2(samples, 1);
  const Timestamp start = sys_days{year{2022} / January / 1};
  for (std::size_t t = 0; t < samples; ++t) {
    ds.timestamps.push_back(start + hours{t});
    ds.values(t, 0) = 0.5 + 0.5 * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / period);
  }
  ds.provenance.input_records = samples;
  ds.provenance.imputed.assign(1, 0);
  return ds;
}

void write_clean_csv(const CleanDataset& ds, std::ostream& out) {
  std::vector<std::string> header{"timestamp"};
  header.insert(header.end(), ds.columns.begin(), ds.columns.end());
  out << csv_row(header) << '\n';
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    std::vector<std::string> fields{format_timestamp(ds.timestamps[r])};
    for (std::size_t c = 0; c < ds.values.cols(); ++c) fields.push_back(format_double(ds.values(r, c)));
    out << csv_row(fields) << '\n';
  }
}

void write_provenance(const CleanDataset& ds, std::ostream& out) {
  const Provenance& p = ds.provenance;
  out << "input_records=" << p.input_records << '\n'
      << "duplicates_dropped=" << p.duplicates_dropped << '\n'
      << "hours_inserted=" << p.hours_inserted << '\n'
      << "leading_rows_dropped=" << p.leading_rows_dropped << '\n'
      << "output_rows=" << ds.rows() << '\n';
  if (ds.rows() > 0) {
    out << "first_hour=" << format_timestamp(ds.timestamps.front()) << '\n'
        << "last_hour=" << format_timestamp(ds.timestamps.back()) << '\n';
  }
  for (std::size_t c = 0; c < p.imputed.size() && c < ds.columns.size(); ++c) {
    out << "imputed." << ds.columns[c] << '=' << p.imputed[c] << '\n';
  }
}

}  // namespace windcast
