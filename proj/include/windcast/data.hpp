// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "windcast/network.hpp"
#include "windcast/tensor.hpp"

namespace windcast {

/// Station-local wall-clock time, stored without a zone.
using Timestamp = std::chrono::sys_seconds;

/// Accepts "YYYY-MM-DDTHH:MM[:SS]" (a space may replace the T).
std::optional<Timestamp> parse_timestamp(std::string_view text);
/// "YYYY-MM-DDTHH:MM:SS"
std::string format_timestamp(Timestamp t);

/// The nine hourly LCD features, in model column order. Wind speed is the target.
enum class Feature : std::size_t {
  DewPointTemperature,  // deg F
  DryBulbTemperature,   // deg F
  RelativeHumidity,     // percent
  SeaLevelPressure,     // inHg
  StationPressure,      // inHg
  Visibility,           // miles
  WetBulbTemperature,   // deg F
  WindDirection,        // degrees
  WindSpeed,            // mph
};

inline constexpr std::size_t kFeatureCount = 9;
inline constexpr std::size_t kWindSpeedColumn = static_cast<std::size_t>(Feature::WindSpeed);

/// LCD header names, indexed by Feature.
inline constexpr std::array<std::string_view, kFeatureCount> kLcdColumns = {
    "HourlyDewPointTemperature", "HourlyDryBulbTemperature", "HourlyRelativeHumidity",
    "HourlySeaLevelPressure",    "HourlyStationPressure",    "HourlyVisibility",
    "HourlyWetBulbTemperature",  "HourlyWindDirection",      "HourlyWindSpeed",
};

struct HourlyRecord {
  Timestamp timestamp{};
  std::array<std::optional<double>, kFeatureCount> values{};

  std::optional<double> get(Feature f) const { return values[static_cast<std::size_t>(f)]; }
  bool operator==(const HourlyRecord&) const = default;
};

/// Value-level LCD conventions: blank and "*" are missing, "VRB" (variable wind
/// direction) is missing, and trailing quality letters are dropped ("72s" -> 72).
/// Text that is still not a number after that is missing too.
std::optional<double> parse_lcd_value(std::string_view raw);

struct RowError {
  std::size_t line = 0;
  std::string message;
};

struct ParseResult {
  std::vector<HourlyRecord> records;
  std::vector<RowError> errors;
  /// Daily/monthly summary rows and rows with no hourly values.
  std::size_t non_hourly_rows = 0;
  /// Numeric values dropped for being outside the physical range of their feature.
  std::size_t out_of_range_values = 0;
};

/// Parses an LCD CSV, selecting columns by header name. Throws FormatError when
/// DATE or one of the nine hourly columns is missing; row-level problems
/// (bad or non-increasing timestamps, short rows) are collected and skipped.
ParseResult parse_lcd_csv(std::istream& in);
ParseResult parse_lcd_file(const std::filesystem::path& path);

/// DATE plus the nine hourly columns; parse_lcd_csv reads it back value-identically.
void write_lcd_csv(std::span<const HourlyRecord> records, std::ostream& out);

struct Provenance {
  std::size_t input_records = 0;
  std::size_t duplicates_dropped = 0;
  std::size_t hours_inserted = 0;
  std::size_t leading_rows_dropped = 0;
  /// Forward-filled values per column.
  std::vector<std::size_t> imputed;

  bool operator==(const Provenance&) const = default;
};

/// Hourly matrix without gaps. Rows are consecutive hours.
struct CleanDataset {
  std::vector<std::string> columns;
  std::size_t target_column = 0;
  std::vector<Timestamp> timestamps;
  Tensor2 values;  // rows x columns
  Provenance provenance;

  std::size_t rows() const noexcept { return timestamps.size(); }
  /// Rows [first, last) with the same columns.
  CleanDataset slice(std::size_t first, std::size_t last) const;
};

/// One row per hour (the first report of each hour wins, stamped at the top of
/// the hour); hours absent from the input are inserted; rows before the first
/// fully populated hour are dropped; remaining gaps are forward-filled.
CleanDataset clean(std::span<const HourlyRecord> records);
/// Replaces the HourlyWindDirection column (degrees) by its sine and cosine,
/// so 359 and 1 degrees land next to each other. Throws DataError if the
/// column is absent.
CleanDataset encode_wind_direction_cyclic(const CleanDataset& ds);
/// Inverse view of an LCD-shaped dataset, for re-cleaning and round trips.
std::vector<HourlyRecord> to_records(const CleanDataset& ds);

/// Chronological split: the first floor(n * ratio) rows train, the rest test.
/// Both sides must hold at least lookback + 1 rows.
std::pair<CleanDataset, CleanDataset> split(const CleanDataset& ds, double ratio,
                                            std::size_t lookback);

/// Per-column min-max scaling to [0, 1], fitted on training rows only.
/// Data outside the fitted range maps outside [0, 1].
class Scaler {
 public:
  static Scaler fit(const CleanDataset& train);

  CleanDataset apply(const CleanDataset& ds) const;
  CleanDataset inverse(const CleanDataset& ds) const;
  double transform_value(std::size_t column, double v) const;
  double inverse_value(std::size_t column, double v) const;

  const std::vector<double>& mins() const noexcept { return mins_; }
  const std::vector<double>& maxs() const noexcept { return maxs_; }

 private:
  std::vector<double> mins_;
  std::vector<double> maxs_;
};

/// Stride-1 windows: window i holds rows [i, i + T) and targets row i + T.
std::vector<Window> make_windows(const CleanDataset& ds, std::size_t lookback);

/// Noiseless single-column series 0.5 + 0.5 sin(2 pi t / period), hourly from 2022-01-01.
CleanDataset sine_dataset(std::size_t samples, double period);

/// timestamp column followed by the dataset columns, shortest round-trip decimals.
void write_clean_csv(const CleanDataset& ds, std::ostream& out);
/// key=value lines describing how the dataset was cleaned.
void write_provenance(const CleanDataset& ds, std::ostream& out);

}  // namespace windcast
