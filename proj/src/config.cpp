// SPDX-License-Identifier: Apache-2.0
#include "windcast/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "windcast/data.hpp"
#include "windcast/error.hpp"

namespace windcast {

namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

class Reader {
 public:
  explicit Reader(std::vector<std::string>& problems) : problems_(problems) {}

  void problem(std::string p) { problems_.push_back(std::move(p)); }

  const Json* object(const Json& parent, const char* key, const std::string& where) {
    if (!parent.contains(key)) return nullptr;
    const Json& v = parent.at(key);
    if (!v.is_object()) {
      problem(where + "." + key + " must be an object");
      return nullptr;
    }
    return &v;
  }

  void allow_keys(const Json& obj, const std::string& where, std::initializer_list<const char*> keys) {
    for (const auto& item : obj.items()) {
      const bool known = std::any_of(keys.begin(), keys.end(), [&](const char* k) { return item.key() == k; });
      if (!known) {
        std::string allowed;
        for (const char* k : keys) allowed += (allowed.empty() ? "" : ", ") + std::string(k);
        problem("unknown key " + where + "." + item.key() + " (allowed: " + allowed + ")");
      }
    }
  }

  template <typename UInt>
  void uint(const Json& obj, const char* key, const std::string& where, UInt& out, UInt min = 0) {
    if (!obj.contains(key)) return;
    const Json& v = obj.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      problem(where + "." + key + " must be a non-negative integer");
      return;
    }
    const auto value = v.get<std::uint64_t>();
    if (value < min) {
      problem(where + "." + key + " must be >= " + std::to_string(min));
      return;
    }
    out = static_cast<UInt>(value);
  }

  void real(const Json& obj, const char* key, const std::string& where, double& out) {
    if (!obj.contains(key)) return;
    const Json& v = obj.at(key);
    if (!v.is_number()) {
      problem(where + "." + key + " must be a number");
      return;
    }
    out = v.get<double>();
  }

  void text(const Json& obj, const char* key, const std::string& where, std::string& out) {
    if (!obj.contains(key)) return;
    const Json& v = obj.at(key);
    if (!v.is_string()) {
      problem(where + "." + key + " must be a string");
      return;
    }
    out = v.get<std::string>();
  }

  std::vector<std::string> strings(const Json& obj, const char* key, const std::string& where) {
    std::vector<std::string> out;
    if (!obj.contains(key)) return out;
    const Json& v = obj.at(key);
    if (!v.is_array()) {
      problem(where + "." + key + " must be an array of strings");
      return out;
    }
    for (const auto& item : v) {
      if (!item.is_string()) {
        problem(where + "." + key + " must contain only strings");
        continue;
      }
      out.push_back(item.get<std::string>());
    }
    return out;
  }

  std::optional<fs::path> existing_file(const Json& obj, const char* key, const std::string& where,
                                        const fs::path& base) {
    std::string raw;
    text(obj, key, where, raw);
    if (raw.empty()) return std::nullopt;
    fs::path p = fs::path(raw).is_absolute() ? fs::path(raw) : base / raw;
    p = fs::absolute(p).lexically_normal();
    if (!fs::is_regular_file(p)) problem(where + "." + key + ": file " + p.string() + " does not exist");
    return p;
  }

 private:
  std::vector<std::string>& problems_;
};

std::optional<ModelVariant> parse_variant(const std::string& label) {
  std::istringstream words(label);
  std::string mode, cell, extra;
  words >> mode >> cell;
  if (!(words >> extra).fail()) return std::nullopt;
  try {
    return ModelVariant{parse_cell_kind(cell), parse_state_mode(mode)};
  } catch (const ConfigError&) {
    return std::nullopt;
  }
}

std::string variant_label(const ModelVariant& v) {
  ModelConfig c;
  c.cell = v.cell;
  c.mode = v.mode;
  return c.label();
}

Json clip_json(const std::optional<double>& clip) { return clip ? Json(*clip) : Json(nullptr); }

}  // namespace

RunConfig parse_run_config(const Json& doc, const fs::path& base_dir, const ConfigOverrides& overrides) {
  std::vector<std::string> problems;
  Reader rd(problems);
  RunConfig cfg;
  ModelConfig& model = cfg.training.model;

  if (!doc.is_object()) throw ConfigError("config root must be a JSON object");
  rd.allow_keys(doc, "config", {"seed", "threads", "out", "model", "training", "data", "grid", "gradcheck"});
  rd.uint(doc, "seed", "config", cfg.seed);
  rd.uint<std::size_t>(doc, "threads", "config", cfg.threads, 1);
  std::string out_text;
  rd.text(doc, "out", "config", out_text);
  if (!out_text.empty()) cfg.out = fs::path(out_text).is_absolute() ? fs::path(out_text) : base_dir / out_text;

  if (const Json* m = rd.object(doc, "model", "config")) {
    rd.allow_keys(*m, "model", {"cell", "mode", "layers", "hidden", "lookback", "wind_direction"});
    std::string cell, mode;
    rd.text(*m, "cell", "model", cell);
    rd.text(*m, "mode", "model", mode);
    try {
      if (!cell.empty()) model.cell = parse_cell_kind(cell);
    } catch (const ConfigError& e) {
      rd.problem("model.cell: " + std::string(e.what()));
    }
    try {
      if (!mode.empty()) model.mode = parse_state_mode(mode);
    } catch (const ConfigError& e) {
      rd.problem("model.mode: " + std::string(e.what()));
    }
    rd.uint<std::size_t>(*m, "layers", "model", model.layers, 1);
    rd.uint<std::size_t>(*m, "hidden", "model", model.hidden_width, 1);
    rd.uint<std::size_t>(*m, "lookback", "model", model.lookback, 1);
    std::string wind;
    rd.text(*m, "wind_direction", "model", wind);
    if (wind == "cyclic") {
      cfg.cyclic_wind_direction = true;
    } else if (!wind.empty() && wind != "raw") {
      rd.problem("model.wind_direction \"" + wind + "\" unknown (allowed: raw, cyclic)");
    }
  }

  if (const Json* t = rd.object(doc, "training", "config")) {
    rd.allow_keys(*t, "training", {"epochs", "learning_rate", "beta1", "beta2", "epsilon", "clip_norm", "train_ratio",
                                         "track_train_rmse"});
    if (t->contains("track_train_rmse")) {
      if (t->at("track_train_rmse").is_boolean()) {
        cfg.training.track_train_rmse = t->at("track_train_rmse").get<bool>();
      } else {
        rd.problem("training.track_train_rmse must be true or false");
      }
    }
    rd.uint<std::size_t>(*t, "epochs", "training", cfg.training.epochs, 1);
    rd.real(*t, "learning_rate", "training", cfg.training.adam.learning_rate);
    rd.real(*t, "beta1", "training", cfg.training.adam.beta1);
    rd.real(*t, "beta2", "training", cfg.training.adam.beta2);
    rd.real(*t, "epsilon", "training", cfg.training.adam.epsilon);
    rd.real(*t, "train_ratio", "training", cfg.train_ratio);
    if (t->contains("clip_norm")) {
      if (t->at("clip_norm").is_null()) {
        cfg.training.clip_norm.reset();
      } else {
        double clip = 0.0;
        rd.real(*t, "clip_norm", "training", clip);
        cfg.training.clip_norm = clip;
      }
    }
  }
  if (!(cfg.train_ratio > 0.0 && cfg.train_ratio < 1.0)) {
    rd.problem("training.train_ratio must lie strictly between 0 and 1");
  }

  if (const Json* d = rd.object(doc, "data", "config")) {
    rd.allow_keys(*d, "data", {"site", "month", "path", "synthetic"});
    DataSource src;
    rd.text(*d, "site", "data", src.site);
    rd.text(*d, "month", "data", src.month);
    src.path = rd.existing_file(*d, "path", "data", base_dir);
    if (const Json* s = rd.object(*d, "synthetic", "data")) {
      rd.allow_keys(*s, "data.synthetic", {"kind", "samples", "period"});
      std::string kind = "sine";
      rd.text(*s, "kind", "data.synthetic", kind);
      if (kind != "sine") rd.problem("data.synthetic.kind \"" + kind + "\" unknown (allowed: sine)");
      SineSource sine;
      rd.uint<std::size_t>(*s, "samples", "data.synthetic", sine.samples, 2);
      rd.real(*s, "period", "data.synthetic", sine.period);
      if (!(sine.period > 0.0)) rd.problem("data.synthetic.period must be > 0");
      src.sine = sine;
    }
    if (src.path.has_value() == src.sine.has_value()) {
      rd.problem("data needs exactly one of \"path\" or \"synthetic\"");
    }
    cfg.data = src;
  }

  if (const Json* g = rd.object(doc, "grid", "config")) {
    rd.allow_keys(*g, "grid", {"sites", "months", "models", "datasets"});
    GridSpec grid;
    grid.sites = rd.strings(*g, "sites", "grid");
    grid.months = rd.strings(*g, "months", "grid");
    if (grid.sites.empty()) rd.problem("grid.sites must list at least one site");
    if (grid.months.empty()) rd.problem("grid.months must list at least one month");
    if (g->contains("models")) {
      grid.variants.clear();
      for (const auto& label : rd.strings(*g, "models", "grid")) {
        if (auto v = parse_variant(label)) {
          grid.variants.push_back(*v);
        } else {
          rd.problem("grid.models: unknown model \"" + label +
                     "\" (allowed: Stateless LSTM, Stateful LSTM, Stateless GRU, Stateful GRU)");
        }
      }
      if (grid.variants.empty()) rd.problem("grid.models must list at least one model");
    }
    if (g->contains("datasets") && !g->at("datasets").is_array()) {
      rd.problem("grid.datasets must be an array");
    } else if (g->contains("datasets")) {
      std::size_t i = 0;
      for (const auto& item : g->at("datasets")) {
        const std::string where = "grid.datasets[" + std::to_string(i++) + "]";
        if (!item.is_object()) {
          rd.problem(where + " must be an object");
          continue;
        }
        rd.allow_keys(item, where, {"site", "month", "path"});
        DatasetRef ref;
        rd.text(item, "site", where, ref.site);
        rd.text(item, "month", where, ref.month);
        if (auto p = rd.existing_file(item, "path", where, base_dir)) {
          ref.path = *p;
        } else {
          rd.problem(where + ".path is required");
        }
        grid.datasets.push_back(ref);
      }
    }
    for (const auto& site : grid.sites) {
      for (const auto& month : grid.months) {
        const bool found = std::any_of(grid.datasets.begin(), grid.datasets.end(),
                                       [&](const DatasetRef& d) { return d.site == site && d.month == month; });
        if (!found) rd.problem("grid: no dataset declared for " + site + "/" + month);
      }
    }
    cfg.grid = std::move(grid);
  }

  if (const Json* gc = rd.object(doc, "gradcheck", "config")) {
    rd.allow_keys(*gc, "gradcheck", {"layers", "hidden", "lookback", "epsilon", "tolerance"});
    rd.uint<std::size_t>(*gc, "layers", "gradcheck", cfg.gradcheck.layers, 1);
    rd.uint<std::size_t>(*gc, "hidden", "gradcheck", cfg.gradcheck.hidden, 1);
    rd.uint<std::size_t>(*gc, "lookback", "gradcheck", cfg.gradcheck.lookback, 1);
    rd.real(*gc, "epsilon", "gradcheck", cfg.gradcheck.epsilon);
    rd.real(*gc, "tolerance", "gradcheck", cfg.gradcheck.tolerance);
    if (!(cfg.gradcheck.epsilon > 0.0)) rd.problem("gradcheck.epsilon must be > 0");
    if (!(cfg.gradcheck.tolerance > 0.0)) rd.problem("gradcheck.tolerance must be > 0");
  }

  if (overrides.seed) cfg.seed = *overrides.seed;
  if (overrides.out) cfg.out = *overrides.out;
  if (overrides.threads) {
    if (*overrides.threads < 1) rd.problem("--threads must be >= 1");
    cfg.threads = *overrides.threads;
  }
  cfg.out = fs::absolute(cfg.out).lexically_normal();

  model.seed = cfg.seed;
  model.input_width = cfg.data && cfg.data->sine ? 1 : kFeatureCount + (cfg.cyclic_wind_direction ? 1 : 0);
  if (cfg.cyclic_wind_direction && cfg.data && cfg.data->sine) {
    rd.problem("model.wind_direction \"cyclic\" needs LCD data, not a synthetic series");
  }
  if (cfg.data) {
    cfg.training.site = cfg.data->site;
    cfg.training.month = cfg.data->month;
  }
  try {
    cfg.training.validate();
  } catch (const ConfigError& e) {
    for (const auto& p : e.problems()) {
      if (std::find(problems.begin(), problems.end(), p) == problems.end()) problems.push_back(p);
    }
  }
  if (cfg.grid) {
    cfg.grid->base = cfg.training;
    cfg.grid->train_ratio = cfg.train_ratio;
    cfg.grid->threads = cfg.threads;
    cfg.grid->cyclic_wind_direction = cfg.cyclic_wind_direction;
  }

  if (!problems.empty()) throw ConfigError(std::move(problems));
  return cfg;
}

RunConfig load_run_config(const fs::path& path, const ConfigOverrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_run_config(doc, fs::absolute(path).parent_path(), overrides);
}

Json resolved_config_json(const RunConfig& cfg) {
  const ModelConfig& m = cfg.training.model;
  Json doc;
  doc["seed"] = cfg.seed;
  doc["threads"] = cfg.threads;
  doc["out"] = cfg.out.string();
  doc["model"] = {{"cell", std::string(to_string(m.cell))},
                  {"mode", std::string(to_string(m.mode))},
                  {"layers", m.layers},
                  {"hidden", m.hidden_width},
                  {"lookback", m.lookback},
                  {"wind_direction", cfg.cyclic_wind_direction ? "cyclic" : "raw"}};
  doc["training"] = {{"epochs", cfg.training.epochs},
                     {"learning_rate", cfg.training.adam.learning_rate},
                     {"beta1", cfg.training.adam.beta1},
                     {"beta2", cfg.training.adam.beta2},
                     {"epsilon", cfg.training.adam.epsilon},
                     {"clip_norm", clip_json(cfg.training.clip_norm)},
                     {"train_ratio", cfg.train_ratio},
                     {"track_train_rmse", cfg.training.track_train_rmse}};
  if (cfg.data) {
    Json d = {{"site", cfg.data->site}, {"month", cfg.data->month}};
    if (cfg.data->path) d["path"] = cfg.data->path->string();
    if (cfg.data->sine) {
      d["synthetic"] = {{"kind", "sine"}, {"samples", cfg.data->sine->samples}, {"period", cfg.data->sine->period}};
    }
    doc["data"] = d;
  }
  if (cfg.grid) {
    Json models = Json::array();
    for (const auto& v : cfg.grid->variants) models.push_back(variant_label(v));
    Json datasets = Json::array();
    for (const auto& d : cfg.grid->datasets) {
      datasets.push_back({{"site", d.site}, {"month", d.month}, {"path", d.path.string()}});
    }
    doc["grid"] = {{"sites", cfg.grid->sites}, {"months", cfg.grid->months}, {"models", models}, {"datasets", datasets}};
  }
  doc["gradcheck"] = {{"layers", cfg.gradcheck.layers},
                      {"hidden", cfg.gradcheck.hidden},
                      {"lookback", cfg.gradcheck.lookback},
                      {"epsilon", cfg.gradcheck.epsilon},
                      {"tolerance", cfg.gradcheck.tolerance}};
  return doc;
}

}  // namespace windcast
