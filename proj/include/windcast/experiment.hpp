// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "windcast/data.hpp"
#include "windcast/network.hpp"
#include "windcast/optim.hpp"

namespace windcast {

struct TrainSpec {
  ModelConfig model;
  std::size_t epochs = 100;
  AdamHyper adam;
  /// Global-norm clip applied before every Adam step; nullopt disables clipping.
  std::optional<double> clip_norm = 5.0;
  /// Evaluate train RMSE after every epoch (one extra forward pass over the train windows).
  bool track_train_rmse = false;
  std::string site;
  std::string month;

  void validate() const;
};

struct ExperimentReport {
  std::string site;
  std::string month;
  ModelConfig model;
  std::size_t epochs = 0;
  AdamHyper adam;
  std::optional<double> clip_norm;

  std::vector<double> epoch_losses;  // mean squared error per epoch during training
  std::vector<double> epoch_train_rmse;  // empty unless TrainSpec::track_train_rmse
  std::size_t train_windows = 0;
  std::size_t test_windows = 0;
  double train_rmse = 0.0;
  double test_rmse = 0.0;
  double train_mse = 0.0;
  double test_mse = 0.0;
  double wall_seconds = 0.0;
  Provenance provenance;

  // Test split, normalized units, in chronological order.
  std::vector<Timestamp> test_timestamps;
  std::vector<double> test_actual;
  std::vector<double> test_predicted;

  std::string model_label() const { return model.label(); }
  /// Lowest tracked train RMSE and its 1-based epoch; nullopt when untracked.
  std::optional<std::pair<double, std::size_t>> best_train_rmse() const;
};

struct TrainedModel {
  StackedModel model;
  ExperimentReport report;
};

/// Predictions for `windows` in order, starting from reset states.
std::vector<double> evaluate(StackedModel& model, std::span<const Window> windows);

/// Online training: each epoch visits the train windows chronologically with
/// one BPTT + clip + Adam update per window. Stateful models are reset at the
/// start of every epoch and before each evaluation pass.
/// Throws DivergenceError if a loss becomes non-finite.
TrainedModel train_model(const TrainSpec& spec, std::span<const Window> train_windows,
                         std::span<const Window> test_windows);
ExperimentReport train(const TrainSpec& spec, std::span<const Window> train_windows,
                       std::span<const Window> test_windows);

/// Normalized windows for one dataset.
struct PreparedData {
  Scaler scaler;
  std::size_t target_column = 0;
  std::vector<Window> train;
  std::vector<Window> test;
  Provenance provenance;
};

/// split -> fit scaler on train -> scale both -> window both.
PreparedData prepare_data(const CleanDataset& ds, double train_ratio, std::size_t lookback);

/// key=value summary. Wall time is left out so identical runs give identical files.
void write_report_summary(const ExperimentReport& report, std::ostream& out);

/// CSV: timestamp,actual,predicted,actual_normalized,predicted_normalized
void write_plot_data(const ExperimentReport& report, const Scaler& scaler,
                     std::size_t target_column, std::ostream& out);
void emit_plot_data(const ExperimentReport& report, const Scaler& scaler,
                    std::size_t target_column, const std::filesystem::path& path);

}  // namespace windcast
