// SPDX-License-Identifier: Apache-2.0
#include "windcast/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>

#include "windcast/csv.hpp"
#include "windcast/error.hpp"
#include "windcast/metrics.hpp"

namespace windcast {

void TrainSpec::validate() const {
  std::vector<std::string> problems;
  try {
    model.validate();
  } catch (const ConfigError& e) {
    problems.insert(problems.end(), e.problems().begin(), e.problems().end());
  }
  try {
    adam.validate();
  } catch (const ConfigError& e) {
    problems.insert(problems.end(), e.problems().begin(), e.problems().end());
  }
  if (epochs < 1) problems.push_back("training.epochs must be >= 1");
  if (clip_norm && !(*clip_norm > 0.0)) problems.push_back("training.clip_norm must be > 0 or null");
  if (!problems.empty()) throw ConfigError(std::move(problems));
}

std::optional<std::pair<double, std::size_t>> ExperimentReport::best_train_rmse() const {
  if (epoch_train_rmse.empty()) return std::nullopt;
  const auto it = std::min_element(epoch_train_rmse.begin(), epoch_train_rmse.end());
  return std::pair{*it, static_cast<std::size_t>(it - epoch_train_rmse.begin()) + 1};
}

std::vector<double> evaluate(StackedModel& model, std::span<const Window> windows) {
  reset_states(model);
  std::vector<double> out;
  out.reserve(windows.size());
  for (const Window& w : windows) out.push_back(predict(model, w));
  return out;
}

TrainedModel train_model(const TrainSpec& spec, std::span<const Window> train_windows,
                         std::span<const Window> test_windows) {
  spec.validate();
  if (train_windows.empty() || test_windows.empty()) {
    throw ConfigError("training needs non-empty train and test window lists");
  }
  const auto started = std::chrono::steady_clock::now();

  StackedModel model = build_model(spec.model);
  AdamState adam(model.params());

  ExperimentReport report;
  report.site = spec.site;
  report.month = spec.month;
  report.model = spec.model;
  report.epochs = spec.epochs;
  report.adam = spec.adam;
  report.clip_norm = spec.clip_norm;
  report.train_windows = train_windows.size();
  report.test_windows = test_windows.size();

  std::vector<double> train_actual;
  train_actual.reserve(train_windows.size());
  for (const Window& w : train_windows) train_actual.push_back(w.target);

  for (std::size_t epoch = 1; epoch <= spec.epochs; ++epoch) {
    if (spec.model.mode == StateMode::Stateful) reset_states(model);
    double total = 0.0;
    for (const Window& w : train_windows) {
      WindowGradients g = bptt_window(model, w);
      if (!std::isfinite(g.loss)) {
        throw DivergenceError(epoch, "non-finite loss at window ending " +
                                         format_timestamp(w.target_time));
      }
      if (spec.clip_norm) clip_global_norm(g.grads, *spec.clip_norm);
      adam_step(model.params(), g.grads, adam, spec.adam);
      total += g.loss;
    }
    const double mean = total / static_cast<double>(train_windows.size());
    if (!std::isfinite(mean)) throw DivergenceError(epoch, "non-finite mean epoch loss");
    report.epoch_losses.push_back(mean);
    if (spec.track_train_rmse) {
      report.epoch_train_rmse.push_back(rmse(evaluate(model, train_windows), train_actual));
    }
  }

  const std::vector<double> train_pred = evaluate(model, train_windows);

  for (const Window& w : test_windows) {
    report.test_actual.push_back(w.target);
    report.test_timestamps.push_back(w.target_time);
  }
  report.test_predicted = evaluate(model, test_windows);

  report.train_mse = mse(train_pred, train_actual);
  report.train_rmse = std::sqrt(report.train_mse);
  report.test_mse = mse(report.test_predicted, report.test_actual);
  report.test_rmse = std::sqrt(report.test_mse);
  if (!std::isfinite(report.train_mse) || !std::isfinite(report.test_mse)) {
    throw DivergenceError(spec.epochs, "non-finite evaluation error");
  }
  reset_states(model);

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return {std::move(model), std::move(report)};
}

ExperimentReport train(const TrainSpec& spec, std::span<const Window> train_windows,
                       std::span<const Window> test_windows) {
  return train_model(spec, train_windows, test_windows).report;
}

PreparedData prepare_data(const CleanDataset& ds, double train_ratio, std::size_t lookback) {
  auto [train_rows, test_rows] = split(ds, train_ratio, lookback);
  PreparedData out{Scaler::fit(train_rows), ds.target_column, {}, {}, ds.provenance};
  out.train = make_windows(out.scaler.apply(train_rows), lookback);
  out.test = make_windows(out.scaler.apply(test_rows), lookback);
  return out;
}

void write_report_summary(const ExperimentReport& r, std::ostream& out) {
  out << "# windcast experiment report\n"
      << "# errors are in min-max normalized target units (scaler fitted on the train split)\n"
      << "# f1: not reported; the target is continuous and no classification threshold applies\n"
      << "site=" << r.site << '\n'
      << "month=" << r.month << '\n'
      << "model=" << r.model_label() << '\n'
      << "cell=" << to_string(r.model.cell) << '\n'
      << "mode=" << to_string(r.model.mode) << '\n'
      << "layers=" << r.model.layers << '\n'
      << "input_width=" << r.model.input_width << '\n'
      << "hidden=" << r.model.hidden_width << '\n'
      << "lookback=" << r.model.lookback << '\n'
      << "seed=" << r.model.seed << '\n'
      << "epochs=" << r.epochs << '\n'
      << "learning_rate=" << format_double(r.adam.learning_rate) << '\n'
      << "beta1=" << format_double(r.adam.beta1) << '\n'
      << "beta2=" << format_double(r.adam.beta2) << '\n'
      << "epsilon=" << format_double(r.adam.epsilon) << '\n'
      << "clip_norm=" << (r.clip_norm ? format_double(*r.clip_norm) : "none") << '\n'
      << "train_windows=" << r.train_windows << '\n'
      << "test_windows=" << r.test_windows << '\n'
      << "train_rmse=" << format_double(r.train_rmse) << '\n'
      << "test_rmse=" << format_double(r.test_rmse) << '\n'
      << "train_mse=" << format_double(r.train_mse) << '\n'
      << "test_mse=" << format_double(r.test_mse) << '\n'
      << "input_records=" << r.provenance.input_records << '\n'
      << "duplicates_dropped=" << r.provenance.duplicates_dropped << '\n'
      << "hours_inserted=" << r.provenance.hours_inserted << '\n'
      << "leading_rows_dropped=" << r.provenance.leading_rows_dropped << '\n';
  for (std::size_t c = 0; c < r.provenance.imputed.size(); ++c) {
    out << "imputed." << c << '=' << r.provenance.imputed[c] << '\n';
  }
  if (const auto best = r.best_train_rmse()) {
    out << "best_train_rmse=" << format_double(best->first) << '\n'
        << "best_train_epoch=" << best->second << '\n';
  }
  for (std::size_t e = 0; e < r.epoch_losses.size(); ++e) {
    out << "epoch_loss." << (e + 1) << '=' << format_double(r.epoch_losses[e]) << '\n';
  }
  for (std::size_t e = 0; e < r.epoch_train_rmse.size(); ++e) {
    out << "epoch_train_rmse." << (e + 1) << '=' << format_double(r.epoch_train_rmse[e]) << '\n';
  }
}

void write_plot_data(const ExperimentReport& r, const Scaler& scaler, std::size_t target_column,
                     std::ostream& out) {
  out << "timestamp,actual,predicted,actual_normalized,predicted_normalized\n";
  for (std::size_t i = 0; i < r.test_actual.size(); ++i) {
    out << format_timestamp(r.test_timestamps[i]) << ','
        << format_double(scaler.inverse_value(target_column, r.test_actual[i])) << ','
        << format_double(scaler.inverse_value(target_column, r.test_predicted[i])) << ','
        << format_double(r.test_actual[i]) << ',' << format_double(r.test_predicted[i]) << '\n';
  }
}

void emit_plot_data(const ExperimentReport& r, const Scaler& scaler, std::size_t target_column,
                    const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write plot data to " + path.string());
  write_plot_data(r, scaler, target_column, out);
  if (!out) throw Error("failed writing plot data to " + path.string());
}

}  // namespace windcast
