// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "windcast/csv.hpp"
#include "windcast/data.hpp"
#include "windcast/error.hpp"

using namespace windcast;
using std::chrono::hours;
using std::chrono::minutes;

namespace {

const char* kHeader =
    "\"STATION\",\"DATE\",\"NAME\",\"REPORT_TYPE\",\"HourlyDewPointTemperature\",\"HourlyDryBulbTemperature\","
    "\"HourlyRelativeHumidity\",\"HourlySeaLevelPressure\",\"HourlyStationPressure\",\"HourlyVisibility\","
    "\"HourlyWetBulbTemperature\",\"HourlyWindDirection\",\"HourlyWindSpeed\"\n";

Timestamp at(int day, int hour, int minute = 0) {
  using namespace std::chrono;
  return sys_days{year{2022} / July / day} + hours{hour} + minutes{minute};
}

HourlyRecord full_record(Timestamp t, double base) {
  HourlyRecord r;
  r.timestamp = t;
  for (std::size_t f = 0; f < kFeatureCount; ++f) r.values[f] = base + static_cast<double>(f);
  return r;
}

// n consecutive hours with distinct, varying values in every column.
CleanDataset hourly_dataset(std::size_t n, std::uint64_t seed = 1) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(0.0, 50.0);
  std::vector<HourlyRecord> recs;
  for (std::size_t i = 0; i < n; ++i) {
    HourlyRecord r;
    r.timestamp = at(1, 0) + hours{i};
    for (std::size_t f = 0; f < kFeatureCount; ++f) r.values[f] = dist(gen);
    recs.push_back(r);
  }
  return clean(recs);
}

ParseResult parse_text(const std::string& text) {
  std::istringstream in(text);
  return parse_lcd_csv(in);
}

bool fixture_contains(const std::string& text, const std::string& needle) {
  return text.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("lcd value conventions") {
  CHECK(parse_lcd_value("10") == 10.0);
  CHECK(parse_lcd_value("72s") == 72.0);
  CHECK(parse_lcd_value("29.92s") == 29.92);
  CHECK(parse_lcd_value(" 5 ") == 5.0);
  CHECK(parse_lcd_value("+3") == 3.0);
  CHECK(parse_lcd_value("-4.5") == -4.5);
  CHECK_FALSE(parse_lcd_value("VRB").has_value());
  CHECK_FALSE(parse_lcd_value("*").has_value());
  CHECK_FALSE(parse_lcd_value("").has_value());
  CHECK_FALSE(parse_lcd_value("M").has_value());
  CHECK_FALSE(parse_lcd_value("1.2.3").has_value());
}

TEST_CASE("timestamps") {
  CHECK(parse_timestamp("2022-07-01T05:56:00") == at(1, 5, 56));
  CHECK(parse_timestamp("2022-07-01 05:56") == at(1, 5, 56));
  CHECK_FALSE(parse_timestamp("2022-02-30T00:00:00").has_value());
  CHECK_FALSE(parse_timestamp("yesterday").has_value());
  CHECK(format_timestamp(at(3, 7, 15)) == "2022-07-03T07:15:00");
}

TEST_CASE("parser selects columns by name and handles quoting") {
  // Columns in a different order than the model uses, plus a quoted comma.
  const std::string text =
      "\"HourlyWindSpeed\",\"NAME\",\"DATE\",\"HourlyWindDirection\",\"HourlyDewPointTemperature\","
      "\"HourlyDryBulbTemperature\",\"HourlyRelativeHumidity\",\"HourlySeaLevelPressure\","
      "\"HourlyStationPressure\",\"HourlyVisibility\",\"HourlyWetBulbTemperature\"\n"
      "\"10\",\"KEY FIELD, MS US\",\"2022-07-01T00:53:00\",\"VRB\",\"70\",\"72s\",\"90\",\"29.95\",\"29.60\","
      "\"10.00\",\"71\"\n"
      "\"8\",\"KEY FIELD, \"\"MS\"\" US\",\"2022-07-01T01:53:00\",\"180\",\"70\",\"73\",\"91\",\"29.95\",\"29.60\","
      "\"9.00\",\"71\"\n";
  const ParseResult r = parse_text(text);
  REQUIRE(r.errors.empty());
  REQUIRE(r.records.size() == 2);
  CHECK(r.records[0].get(Feature::WindSpeed) == 10.0);
  CHECK(r.records[0].get(Feature::DryBulbTemperature) == 72.0);
  CHECK_FALSE(r.records[0].get(Feature::WindDirection).has_value());
  CHECK(r.records[1].get(Feature::WindDirection) == 180.0);
  CHECK(r.records[1].get(Feature::Visibility) == 9.0);
  CHECK(r.records[1].timestamp == at(1, 1, 53));
}

TEST_CASE("parser names every missing header") {
  const std::string text = "\"DATE\",\"HourlyDewPointTemperature\"\n\"2022-07-01T00:53:00\",\"70\"\n";
  try {
    (void)parse_text(text);
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    const std::string msg = e.what();
    CHECK(fixture_contains(msg, "HourlyWindSpeed"));
    CHECK(fixture_contains(msg, "HourlyVisibility"));
    CHECK_FALSE(fixture_contains(msg, "HourlyDewPointTemperature"));
  }
  CHECK_THROWS_AS(parse_text(""), FormatError);
}

TEST_CASE("parser collects row errors and keeps going") {
  std::string text = kHeader;
  text += "\"S\",\"2022-07-01T00:53:00\",\"N\",\"FM-15\",\"70\",\"72\",\"90\",\"29.9\",\"29.6\",\"10\",\"71\",\"180\",\"5\"\n";
  text += "\"S\",\"not a time\",\"N\",\"FM-15\",\"70\",\"72\",\"90\",\"29.9\",\"29.6\",\"10\",\"71\",\"180\",\"5\"\n";
  text += "\"S\",\"2022-07-01T00:10:00\",\"N\",\"FM-15\",\"70\",\"72\",\"90\",\"29.9\",\"29.6\",\"10\",\"71\",\"180\",\"5\"\n";
  text += "\"S\",\"2022-07-01T01:53:00\",\"N\"\n";
  text += "\"S\",\"2022-07-01T23:59:00\",\"N\",\"SOD  \",\"\",\"\",\"\",\"\",\"\",\"\",\"\",\"\",\"\"\n";
  text += "\"S\",\"2022-07-01T02:53:00\",\"N\",\"FM-15\",\"70\",\"72\",\"140\",\"29.9\",\"29.6\",\"10\",\"71\",\"400\",\"-1\"\n";
  const ParseResult r = parse_text(text);
  CHECK(r.records.size() == 2);
  REQUIRE(r.errors.size() == 3);
  CHECK(r.errors[0].line == 3);
  CHECK(fixture_contains(r.errors[0].message, "not a time"));
  CHECK(r.errors[1].line == 4);
  CHECK(r.errors[2].line == 5);
  CHECK(r.non_hourly_rows == 1);
  CHECK(r.out_of_range_values == 3);
  CHECK_FALSE(r.records[1].get(Feature::RelativeHumidity).has_value());
  CHECK_FALSE(r.records[1].get(Feature::WindDirection).has_value());
  CHECK_FALSE(r.records[1].get(Feature::WindSpeed).has_value());
}

TEST_CASE("bundled fixtures parse cleanly and exercise the LCD quirks") {
  for (const char* name : {"data/lcd/starkville_2022-07.csv", "data/lcd/meridian_2022-07.csv"}) {
    CAPTURE(name);
    const auto path = oracle::source_path(name);
    const std::string raw = oracle::read_file(path);
    const ParseResult r = parse_lcd_file(path);
    CHECK(r.errors.empty());
    CHECK(r.records.size() > 150);
    CHECK(r.non_hourly_rows >= 7);
    CHECK(fixture_contains(raw, "s\",\""));
    CHECK(fixture_contains(raw, "\"VRB\""));
    CHECK(fixture_contains(raw, "\"FM-16\""));

    bool saw_vrb_missing = false;
    for (const HourlyRecord& rec : r.records) {
      for (const auto& v : rec.values) {
        if (v) CHECK(std::isfinite(*v));
      }
      if (!rec.get(Feature::WindDirection) && rec.get(Feature::WindSpeed)) saw_vrb_missing = true;
    }
    CHECK(saw_vrb_missing);

    const CleanDataset ds = clean(r.records);
    CHECK(ds.provenance.duplicates_dropped > 0);
    CHECK(ds.provenance.hours_inserted > 0);
    CHECK(ds.rows() == 192);
    CHECK(ds.columns.size() == 9);
    CHECK(ds.target_column == kWindSpeedColumn);
  }
}

TEST_CASE("fixture suffix rows parse to their numeric value") {
  const auto path = oracle::source_path("data/lcd/starkville_2022-07.csv");
  std::ifstream in(path);
  CsvReader reader(in);
  const auto header = *reader.next();
  std::size_t dry = 0, date = 0;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "HourlyDryBulbTemperature") dry = i;
    if (header[i] == "DATE") date = i;
  }
  const ParseResult parsed = parse_lcd_file(path);
  std::size_t checked = 0;
  while (auto row = reader.next()) {
    const std::string& v = (*row)[dry];
    if (v.empty() || v.back() != 's') continue;
    const double expected = std::stod(v.substr(0, v.size() - 1));
    const Timestamp t = *parse_timestamp((*row)[date]);
    for (const HourlyRecord& rec : parsed.records) {
      if (rec.timestamp == t) {
        CHECK(rec.get(Feature::DryBulbTemperature) == expected);
        ++checked;
      }
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("parser round trip is value-identical") {
  for (const char* name : {"data/lcd/starkville_2022-07.csv", "data/lcd/meridian_2022-07.csv"}) {
    const ParseResult first = parse_lcd_file(oracle::source_path(name));
    std::stringstream buf;
    write_lcd_csv(first.records, buf);
    const ParseResult second = parse_lcd_csv(buf);
    CHECK(second.errors.empty());
    CHECK(second.records == first.records);
  }
  std::mt19937_64 gen(3);
  std::vector<HourlyRecord> recs;
  for (int i = 0; i < 50; ++i) {
    HourlyRecord r;
    r.timestamp = at(1, 0) + hours{i} + minutes{static_cast<int>(gen() % 60)};
    for (auto& v : r.values) {
      if (gen() % 5 != 0) v = std::ldexp(static_cast<double>(gen() % 12800), -7);
    }
    recs.push_back(r);
  }
  std::stringstream buf;
  write_lcd_csv(recs, buf);
  const ParseResult back = parse_lcd_csv(buf);
  CHECK(back.records.size() == recs.size() - back.non_hourly_rows);
  std::size_t j = 0;
  for (const HourlyRecord& r : recs) {
    bool any = false;
    for (const auto& v : r.values) any = any || v.has_value();
    if (!any) continue;
    CHECK(back.records[j++] == r);
  }
}

TEST_CASE("clean without gaps keeps values") {
  std::vector<HourlyRecord> recs;
  for (int h = 0; h < 5; ++h) recs.push_back(full_record(at(1, h), h * 10.0));
  const CleanDataset ds = clean(recs);
  REQUIRE(ds.rows() == 5);
  for (std::size_t r = 0; r < 5; ++r) {
    CHECK(ds.timestamps[r] == at(1, static_cast<int>(r)));
    for (std::size_t f = 0; f < kFeatureCount; ++f) CHECK(ds.values(r, f) == *recs[r].values[f]);
  }
  CHECK(ds.provenance.duplicates_dropped == 0);
  CHECK(ds.provenance.hours_inserted == 0);
  CHECK(ds.provenance.leading_rows_dropped == 0);
  for (std::size_t n : ds.provenance.imputed) CHECK(n == 0);
}

TEST_CASE("clean forward-fills, deduplicates and trims") {
  std::vector<HourlyRecord> recs;
  HourlyRecord partial = full_record(at(1, 0), 1.0);
  partial.values[0].reset();
  recs.push_back(partial);  // dropped: before the first complete row
  recs.push_back(full_record(at(1, 1), 5.0));
  HourlyRecord special = full_record(at(1, 1, 30), 99.0);
  recs.push_back(special);  // second report in hour 1
  HourlyRecord gap = full_record(at(1, 2), 6.0);
  gap.values[kWindSpeedColumn].reset();
  recs.push_back(gap);
  HourlyRecord last = full_record(at(1, 3), 7.0);
  recs.push_back(last);
  recs.push_back(full_record(at(1, 5), 9.0));  // hour 4 is absent

  const CleanDataset ds = clean(recs);
  REQUIRE(ds.rows() == 5);
  CHECK(ds.timestamps.front() == at(1, 1));
  CHECK(ds.values(0, 0) == 5.0);
  CHECK(ds.values(1, kWindSpeedColumn) == ds.values(0, kWindSpeedColumn));
  CHECK(ds.values(3, 3) == ds.values(2, 3));  // inserted hour 4
  CHECK(ds.timestamps[3] == at(1, 4));
  CHECK(ds.provenance.duplicates_dropped == 1);
  CHECK(ds.provenance.leading_rows_dropped == 1);
  CHECK(ds.provenance.hours_inserted == 1);
  CHECK(ds.provenance.imputed[kWindSpeedColumn] == 2);
  CHECK(ds.provenance.imputed[0] == 1);
}

TEST_CASE("clean forward fill example") {
  std::vector<HourlyRecord> recs;
  for (int h = 0; h < 3; ++h) recs.push_back(full_record(at(1, h), 0.0));
  recs[0].values[kWindSpeedColumn] = 5.0;
  recs[1].values[kWindSpeedColumn].reset();
  recs[2].values[kWindSpeedColumn] = 7.0;
  const CleanDataset ds = clean(recs);
  CHECK(ds.values(1, kWindSpeedColumn) == 5.0);
  CHECK(ds.values(2, kWindSpeedColumn) == 7.0);
}

TEST_CASE("clean rejects an all-missing feature by name") {
  std::vector<HourlyRecord> recs;
  for (int h = 0; h < 3; ++h) {
    HourlyRecord r = full_record(at(1, h), 1.0);
    r.values[static_cast<std::size_t>(Feature::Visibility)].reset();
    recs.push_back(r);
  }
  try {
    (void)clean(recs);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(fixture_contains(e.what(), "HourlyVisibility"));
  }
  CHECK_THROWS_AS(clean(std::vector<HourlyRecord>{}), DataError);
}

TEST_CASE("clean is idempotent") {
  const ParseResult r = parse_lcd_file(oracle::source_path("data/lcd/meridian_2022-07.csv"));
  const CleanDataset once = clean(r.records);
  const CleanDataset twice = clean(to_records(once));
  CHECK(twice.timestamps == once.timestamps);
  CHECK(bitwise_equal(twice.values, once.values));
  CHECK(twice.provenance.duplicates_dropped == 0);
  CHECK(twice.provenance.hours_inserted == 0);
}

TEST_CASE("chronological split") {
  const CleanDataset ds = hourly_dataset(100);
  const auto [train, test] = split(ds, 0.7, 24);
  CHECK(train.rows() == 70);
  CHECK(test.rows() == 30);
  CHECK(train.timestamps.back() < test.timestamps.front());
  CHECK(train.timestamps.back() + hours{1} == test.timestamps.front());

  const CleanDataset small = hourly_dataset(10);
  const auto [a, b] = split(small, 0.5, 4);
  CHECK(a.rows() == 5);
  CHECK(b.rows() == 5);
  CHECK(a.timestamps.back() + hours{1} == b.timestamps.front());
  CHECK(bitwise_equal(b.values.row_as_column(0), small.values.row_as_column(5)));

  CHECK_THROWS_AS(split(small, 0.5, 5), ConfigError);
  CHECK_THROWS_AS(split(ds, 1.0, 24), ConfigError);
  CHECK_THROWS_AS(split(ds, 0.0, 24), ConfigError);
}

TEST_CASE("scaler") {
  const CleanDataset ds = hourly_dataset(60, 4);
  const auto [train, test] = split(ds, 0.7, 5);
  const Scaler s = Scaler::fit(train);
  const CleanDataset scaled_train = s.apply(train);
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    double lo = 1.0, hi = 0.0;
    for (std::size_t r = 0; r < scaled_train.rows(); ++r) {
      const double v = scaled_train.values(r, f);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    CHECK(lo == 0.0);
    CHECK(hi == 1.0);
  }
  // Changing the test split never moves the fitted statistics.
  CleanDataset other_test = test;
  for (double& v : other_test.values.data()) v = v * 3.0 + 100.0;
  const auto refit = Scaler::fit(train);
  CHECK(refit.mins() == s.mins());
  CHECK(refit.maxs() == s.maxs());
  const CleanDataset scaled_test = s.apply(other_test);
  CHECK(all_finite(scaled_test.values));
  CHECK(all_finite(s.apply(ds).values));

  const CleanDataset back = s.inverse(s.apply(ds));
  for (std::size_t i = 0; i < ds.values.size(); ++i) CHECK(std::fabs(back.values[i] - ds.values[i]) < 1e-12);
  for (double x : {-3.0, 0.0, 17.5, 1e3}) {
    CHECK(std::fabs(s.inverse_value(2, s.transform_value(2, x)) - x) < 1e-12);
  }

  CleanDataset flat = train;
  for (std::size_t r = 0; r < flat.rows(); ++r) flat.values(r, 5) = 10.0;
  try {
    (void)Scaler::fit(flat);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(fixture_contains(e.what(), "HourlyVisibility"));
  }
}

TEST_CASE("windows") {
  CHECK(make_windows(hourly_dataset(25), 24).size() == 1);
  const CleanDataset ds = hourly_dataset(100, 9);
  const auto windows = make_windows(ds, 24);
  REQUIRE(windows.size() == 76);
  CHECK(windows[0].target == ds.values(24, kWindSpeedColumn));
  CHECK(windows[0].target_time == ds.timestamps[24]);
  std::mt19937_64 gen(5);
  for (int k = 0; k < 20; ++k) {
    const std::size_t i = gen() % windows.size();
    const Window& w = windows[i];
    REQUIRE(w.features.rows() == 24);
    REQUIRE(w.features.cols() == 9);
    for (std::size_t t = 0; t < 24; ++t)
      for (std::size_t c = 0; c < 9; ++c) CHECK(w.features(t, c) == ds.values(i + t, c));
    CHECK(w.target == ds.values(i + 24, kWindSpeedColumn));
  }
  CHECK_THROWS_AS(make_windows(hourly_dataset(24), 24), ConfigError);
}

TEST_CASE("sine dataset") {
  const CleanDataset s = sine_dataset(48, 24.0);
  REQUIRE(s.rows() == 48);
  CHECK(s.columns.size() == 1);
  CHECK(s.target_column == 0);
  for (std::size_t t = 0; t < 48; ++t) {
    const long double expected = 0.5L + 0.5L * std::sin(2.0L * 3.14159265358979323846264338327950288L * t / 24.0L);
    CHECK(std::fabs(s.values(t, 0) - static_cast<double>(expected)) < 1e-15);
  }
}

TEST_CASE("cleaned export and provenance") {
  std::vector<HourlyRecord> recs;
  for (int h = 0; h < 3; ++h) recs.push_back(full_record(at(1, h), h + 0.1));
  const CleanDataset ds = clean(recs);
  std::ostringstream csv, prov;
  write_clean_csv(ds, csv);
  write_provenance(ds, prov);
  std::istringstream lines(csv.str());
  std::string header, first;
  std::getline(lines, header);
  std::getline(lines, first);
  CHECK(header.rfind("timestamp,HourlyDewPointTemperature,", 0) == 0);
  CHECK(fixture_contains(header, "HourlyWindSpeed"));
  CHECK(first.rfind("2022-07-01T00:00:00,0.1,1.1,", 0) == 0);
  CHECK(fixture_contains(prov.str(), "duplicates_dropped=0"));
}

TEST_CASE("cyclic wind direction encoding") {
  const CleanDataset ds = clean(parse_lcd_file(oracle::source_path("data/lcd/starkville_2022-07.csv")).records);
  const CleanDataset enc = encode_wind_direction_cyclic(ds);
  const std::size_t dir = static_cast<std::size_t>(Feature::WindDirection);
  REQUIRE(enc.values.cols() == kFeatureCount + 1);
  REQUIRE(enc.columns.size() == kFeatureCount + 1);
  CHECK(enc.columns[dir] == "HourlyWindDirectionSin");
  CHECK(enc.columns[dir + 1] == "HourlyWindDirectionCos");
  CHECK(enc.target_column == kWindSpeedColumn + 1);
  CHECK(enc.columns[enc.target_column] == "HourlyWindSpeed");
  CHECK(enc.timestamps == ds.timestamps);
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    const long double rad = static_cast<long double>(ds.values(i, dir)) * 3.14159265358979323846264338L / 180.0L;
    CHECK(std::fabs(enc.values(i, dir) - static_cast<double>(std::sin(rad))) < 1e-12);
    CHECK(std::fabs(enc.values(i, dir + 1) - static_cast<double>(std::cos(rad))) < 1e-12);
    for (std::size_t c = 0; c < dir; ++c) CHECK(enc.values(i, c) == ds.values(i, c));
    CHECK(enc.values(i, enc.target_column) == ds.values(i, ds.target_column));
  }
  // 359 and 1 degrees are close after encoding.
  CleanDataset two = ds.slice(0, 2);
  two.values(0, dir) = 359.0;
  two.values(1, dir) = 1.0;
  const CleanDataset e2 = encode_wind_direction_cyclic(two);
  CHECK(std::hypot(e2.values(0, dir) - e2.values(1, dir), e2.values(0, dir + 1) - e2.values(1, dir + 1)) < 0.04);
  CHECK_THROWS_AS(encode_wind_direction_cyclic(sine_dataset(10, 4)), DataError);
}
