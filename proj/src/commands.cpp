// SPDX-License-Identifier: Apache-2.0
#include "windcast/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "windcast/checkpoint.hpp"
#include "windcast/csv.hpp"
#include "windcast/data.hpp"
#include "windcast/error.hpp"
#include "windcast/experiment.hpp"
#include "windcast/grid.hpp"

namespace windcast {

namespace {

namespace fs = std::filesystem;

struct GlobalFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> threads;
};

void add_global_flags(CLI::App& cmd, GlobalFlags& flags) {
  cmd.add_option("--config", flags.config, "JSON run configuration file");
  cmd.add_option("--seed", flags.seed, "Random seed (overrides config)");
  cmd.add_option("--out", flags.out, "Output directory (overrides config)");
  cmd.add_option("--threads", flags.threads, "Worker threads for grid runs (overrides config)");
}

ConfigOverrides overrides_from(const GlobalFlags& flags) {
  ConfigOverrides o;
  o.seed = flags.seed;
  if (flags.out) o.out = fs::path(*flags.out);
  o.threads = flags.threads;
  return o;
}

RunConfig resolve_config(const GlobalFlags& flags) {
  if (!flags.config.empty()) return load_run_config(flags.config, overrides_from(flags));
  return parse_run_config(nlohmann::ordered_json::object(), fs::current_path(), overrides_from(flags));
}

std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << contents;
  if (!out) throw Error("failed writing " + path.string());
}

template <typename Fn>
void write_with(const fs::path& path, Fn&& fn) {
  std::ostringstream buf;
  fn(buf);
  write_file(path, buf.str());
}

void prepare_out_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error("cannot create output directory " + dir.string());
}

std::string scientific(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

int cmd_ingest(const GlobalFlags& flags, const std::string& input, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = resolve_config(flags);
  fs::path source;
  if (!input.empty()) {
    source = input;
  } else if (cfg.data && cfg.data->path) {
    source = *cfg.data->path;
  } else {
    throw ConfigError("ingest needs an input CSV (positional argument or data.path in the config)");
  }
  if (!fs::is_regular_file(source)) throw DataError("input file " + source.string() + " does not exist");

  const ParseResult parsed = parse_lcd_file(source);
  for (const RowError& e : parsed.errors) {
    err << "warning: " << source.string() << ":" << e.line << ": " << one_line(e.message) << '\n';
  }
  const CleanDataset ds = clean(parsed.records);

  prepare_out_dir(cfg.out);
  write_with(cfg.out / "cleaned.csv", [&](std::ostream& o) { write_clean_csv(ds, o); });
  write_with(cfg.out / "provenance.txt", [&](std::ostream& o) {
    o << "source=" << source.filename().string() << '\n'
      << "row_errors=" << parsed.errors.size() << '\n'
      << "non_hourly_rows=" << parsed.non_hourly_rows << '\n'
      << "out_of_range_values=" << parsed.out_of_range_values << '\n';
    write_provenance(ds, o);
  });
  out << "ingested " << parsed.records.size() << " hourly reports into " << ds.rows()
      << " hourly rows -> " << (cfg.out / "cleaned.csv").string() << '\n';
  return kExitOk;
}

CleanDataset load_source(const DataSource& src) {
  if (src.sine) return sine_dataset(src.sine->samples, src.sine->period);
  return clean(parse_lcd_file(*src.path).records);
}

int cmd_train(const GlobalFlags& flags, std::ostream& out, std::ostream& err) {
  if (flags.config.empty()) throw ConfigError("train requires --config");
  const RunConfig cfg = resolve_config(flags);
  if (!cfg.data) throw ConfigError("train config needs a \"data\" section");

  CleanDataset ds = load_source(*cfg.data);
  if (cfg.cyclic_wind_direction) ds = encode_wind_direction_cyclic(ds);
  const PreparedData data = prepare_data(ds, cfg.train_ratio, cfg.training.model.lookback);
  TrainedModel trained = train_model(cfg.training, data.train, data.test);
  trained.report.provenance = data.provenance;

  prepare_out_dir(cfg.out);
  write_file(cfg.out / "resolved_config.json", resolved_config_json(cfg).dump(2) + "\n");
  write_with(cfg.out / "summary.txt", [&](std::ostream& o) { write_report_summary(trained.report, o); });
  emit_plot_data(trained.report, data.scaler, data.target_column, cfg.out / "plot_data.csv");
  save_checkpoint(trained.model, cfg.out / "model.ckpt");

  const ExperimentReport& r = trained.report;
  out << r.model_label() << " " << r.site << "/" << r.month << ": train_rmse=" << format_double(r.train_rmse)
      << " test_rmse=" << format_double(r.test_rmse);
  if (const auto best = r.best_train_rmse()) {
    out << " best_train_rmse=" << format_double(best->first) << " (epoch " << best->second << ")";
  }
  out << " (" << r.epochs << " epochs)\n";
  err << "windcast: trained in " << scientific(r.wall_seconds) << " s\n";
  return kExitOk;
}

int cmd_grid(const GlobalFlags& flags, std::ostream& out) {
  if (flags.config.empty()) throw ConfigError("grid requires --config");
  const RunConfig cfg = resolve_config(flags);
  if (!cfg.grid) throw ConfigError("grid config needs a \"grid\" section");

  const GridResult result = run_grid(*cfg.grid);

  prepare_out_dir(cfg.out);
  write_file(cfg.out / "resolved_config.json", resolved_config_json(cfg).dump(2) + "\n");
  for (const GridEntry& e : result.entries) {
    const fs::path dir = cfg.out / cell_directory_name(e.report);
    prepare_out_dir(dir);
    write_with(dir / "summary.txt", [&](std::ostream& o) { write_report_summary(e.report, o); });
    emit_plot_data(e.report, e.scaler, e.target_column, dir / "plot_data.csv");
  }
  write_with(cfg.out / "summary.csv", [&](std::ostream& o) { write_summary_csv(result, o); });
  std::ostringstream table;
  write_summary_table(result, table);
  write_file(cfg.out / "summary.txt", table.str());
  out << table.str();
  return kExitOk;
}

int cmd_gradcheck(const GlobalFlags& flags, std::ostream& out) {
  const RunConfig cfg = resolve_config(flags);
  const auto checks = gradcheck_all_variants(cfg.gradcheck, cfg.seed);
  bool ok = true;
  for (const VariantCheck& c : checks) {
    const bool pass = c.result.max_relative_error < cfg.gradcheck.tolerance;
    ok = ok && pass;
    out << c.label << ": max_relative_error=" << scientific(c.result.max_relative_error)
        << " parameters=" << c.result.parameters_checked << ' ' << (pass ? "PASS" : "FAIL") << '\n';
  }
  return ok ? kExitOk : kExitValidation;
}

}  // namespace

std::vector<VariantCheck> gradcheck_all_variants(const GradcheckSettings& settings, std::uint64_t seed) {
  std::vector<VariantCheck> out;
  for (const ModelVariant& v : kTableVariants) {
    ModelConfig c;
    c.cell = v.cell;
    c.mode = v.mode;
    c.layers = settings.layers;
    c.hidden_width = settings.hidden;
    c.lookback = settings.lookback;
    c.input_width = kFeatureCount;
    c.seed = seed;
    StackedModel model = build_model(c);
    if (c.mode == StateMode::Stateful) predict(model, random_window(seed + 1, c.lookback, c.input_width));
    const Window w = random_window(seed + 2, c.lookback, c.input_width);
    GradCheckOptions options;
    options.epsilon = settings.epsilon;
    out.push_back({c.label(), grad_check(model, w, options)});
  }
  return out;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"windcast: stacked stateful/stateless LSTM and GRU wind-speed forecasting"};
  app.require_subcommand(1, 1);

  GlobalFlags flags;
  std::string ingest_input;

  CLI::App* ingest = app.add_subcommand("ingest", "Parse and clean a NOAA LCD hourly CSV");
  ingest->add_option("input", ingest_input, "LCD CSV file (default: data.path from --config)");
  add_global_flags(*ingest, flags);

  CLI::App* train_cmd = app.add_subcommand("train", "Train one model and write its report");
  add_global_flags(*train_cmd, flags);

  CLI::App* grid = app.add_subcommand("grid", "Train the model comparison grid over sites and months");
  add_global_flags(*grid, flags);

  CLI::App* gradcheck = app.add_subcommand("gradcheck", "Check BPTT gradients of all four variants");
  add_global_flags(*gradcheck, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "windcast: error[validation]: " << one_line(e.what()) << '\n';
    return kExitValidation;
  }

  try {
    if (ingest->parsed()) return cmd_ingest(flags, ingest_input, out, err);
    if (train_cmd->parsed()) return cmd_train(flags, out, err);
    if (grid->parsed()) return cmd_grid(flags, out);
    return cmd_gradcheck(flags, out);
  } catch (const ConfigError& e) {
    err << "windcast: error[validation]: " << one_line(e.what()) << '\n';
    return kExitValidation;
  } catch (const ParameterError& e) {
    err << "windcast: error[validation]: " << one_line(e.what()) << '\n';
    return kExitValidation;
  } catch (const DimensionError& e) {
    err << "windcast: error[validation]: " << one_line(e.what()) << '\n';
    return kExitValidation;
  } catch (const FormatError& e) {
    err << "windcast: error[data]: " << one_line(e.what()) << '\n';
    return kExitData;
  } catch (const DataError& e) {
    err << "windcast: error[data]: " << one_line(e.what()) << '\n';
    return kExitData;
  } catch (const DivergenceError& e) {
    err << "windcast: error[divergence]: epoch=" << e.epoch() << " " << one_line(e.what()) << '\n';
    return kExitDivergence;
  } catch (const std::exception& e) {
    err << "windcast: error[io]: " << one_line(e.what()) << '\n';
    return kExitValidation;
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.push_back("windcast");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace windcast
