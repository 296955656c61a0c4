// SPDX-License-Identifier: Apache-2.0
//
// Run configuration: a JSON file, with the CLI's global flags overriding scalars.
//
//   {
//     "seed": 42,
//     "threads": 1,
//     "out": "runs/example",
//     "model":    {"cell": "LSTM", "mode": "stateless", "layers": 10, "hidden": 32, "lookback": 24,
//                  "wind_direction": "raw"},
//     "training": {"epochs": 100, "learning_rate": 0.001, "beta1": 0.9, "beta2": 0.999,
//                  "epsilon": 1e-8, "clip_norm": 5.0, "train_ratio": 0.7,
//                  "track_train_rmse": false},
//     "data":     {"site": "Starkville", "month": "July", "path": "starkville.csv"},
//     "grid":     {"sites": [...], "months": [...], "models": ["Stateless LSTM", ...],
//                  "datasets": [{"site": ..., "month": ..., "path": ...}]},
//     "gradcheck": {"layers": 2, "hidden": 4, "lookback": 5, "epsilon": 1e-5, "tolerance": 1e-5}
//   }
//
// "data" may instead hold {"synthetic": {"kind": "sine", "samples": 86, "period": 24}}.
// Relative paths resolve against the directory holding the config file.
// "wind_direction": "cyclic" feeds sin and cos of the direction instead of degrees.
// "clip_norm": null disables clipping. Unknown keys are errors.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "windcast/grid.hpp"

namespace windcast {

struct SineSource {
  std::size_t samples = 86;
  double period = 24.0;
};

struct DataSource {
  std::string site = "site";
  std::string month = "month";
  std::optional<std::filesystem::path> path;
  std::optional<SineSource> sine;
};

struct GradcheckSettings {
  std::size_t layers = 2;
  std::size_t hidden = 4;
  std::size_t lookback = 5;
  double epsilon = 1e-5;
  double tolerance = 1e-5;
};

struct RunConfig {
  std::uint64_t seed = 42;
  std::size_t threads = 1;
  std::filesystem::path out = "windcast-out";
  TrainSpec training;  // training.model holds the model section
  double train_ratio = 0.7;
  bool cyclic_wind_direction = false;
  std::optional<DataSource> data;
  std::optional<GridSpec> grid;
  GradcheckSettings gradcheck;
};

struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
  std::optional<std::size_t> threads;
};

/// Parses and validates; throws ConfigError listing every problem found.
/// `base_dir` anchors relative paths.
RunConfig parse_run_config(const nlohmann::ordered_json& doc, const std::filesystem::path& base_dir,
                           const ConfigOverrides& overrides = {});
RunConfig load_run_config(const std::filesystem::path& path, const ConfigOverrides& overrides = {});

/// Every field with defaults filled in, paths absolute. Feeding it back through
/// parse_run_config reproduces the same configuration.
nlohmann::ordered_json resolved_config_json(const RunConfig& config);

}  // namespace windcast
