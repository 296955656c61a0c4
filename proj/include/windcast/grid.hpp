// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "windcast/experiment.hpp"

namespace windcast {

struct ModelVariant {
  CellKind cell;
  StateMode mode;
};

/// Row order of the published comparison table.
inline constexpr std::array<ModelVariant, 4> kTableVariants = {{
    {CellKind::Lstm, StateMode::Stateless},
    {CellKind::Lstm, StateMode::Stateful},
    {CellKind::Gru, StateMode::Stateless},
    {CellKind::Gru, StateMode::Stateful},
}};

struct DatasetRef {
  std::string site;
  std::string month;
  std::filesystem::path path;
};

struct GridSpec {
  std::vector<std::string> sites;
  std::vector<std::string> months;
  std::vector<ModelVariant> variants{kTableVariants.begin(), kTableVariants.end()};
  std::vector<DatasetRef> datasets;
  /// Cell kind, mode, site and month are overwritten per grid cell.
  TrainSpec base;
  double train_ratio = 0.7;
  /// See encode_wind_direction_cyclic.
  bool cyclic_wind_direction = false;
  std::size_t threads = 1;
};

struct GridEntry {
  ExperimentReport report;
  Scaler scaler;
  std::size_t target_column = 0;
};

struct GridResult {
  /// Ordered by site, then month, then variant, each in declaration order.
  std::vector<GridEntry> entries;
};

/// Trains every (site, month, variant) cell. Datasets are loaded and checked
/// before any training starts; a missing file throws DataError naming it.
/// Cells run on up to `threads` threads; the result order does not depend on
/// completion order.
GridResult run_grid(const GridSpec& spec);

/// site,month,model,train_rmse,test_rmse,train_mse,test_mse,published_train_rmse,published_test_rmse
void write_summary_csv(const GridResult& result, std::ostream& out);
/// Aligned text in the published layout: one block per site, one row per
/// model, a Train/Test RMSE column pair per month. Published values follow in
/// parentheses where they exist.
void write_summary_table(const GridResult& result, std::ostream& out);

/// "Starkville_July_stateless_lstm"
std::string cell_directory_name(const ExperimentReport& report);

}  // namespace windcast
