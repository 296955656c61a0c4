// SPDX-License-Identifier: Apache-2.0
#include "windcast/grid.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <exception>
#include <map>
#include <optional>
#include <ostream>
#include <thread>
#include <tuple>

#include "windcast/csv.hpp"
#include "windcast/error.hpp"
#include "windcast/reference_table.hpp"

namespace windcast {

namespace {

struct Job {
  std::size_t dataset;
  ModelVariant variant;
  std::string site;
  std::string month;
};

std::string slug(std::string_view s) {
  std::string out;
  for (char c : s) {
    const auto u = static_cast<unsigned char>(c);
    out.push_back(std::isalnum(u) ? static_cast<char>(std::tolower(u)) : '_');
  }
  return out;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace

std::string cell_directory_name(const ExperimentReport& r) {
  std::string name = r.site + "_" + r.month + "_" + slug(r.model_label());
  for (char& c : name) {
    if (c == ' ' || c == '/' || c == '\\') c = '_';
  }
  return name;
}

GridResult run_grid(const GridSpec& spec) {
  std::vector<std::string> problems;
  if (spec.sites.empty()) problems.push_back("grid.sites is empty");
  if (spec.months.empty()) problems.push_back("grid.months is empty");
  if (spec.variants.empty()) problems.push_back("grid.models is empty");
  if (!problems.empty()) throw ConfigError(std::move(problems));
  spec.base.validate();

  // Resolve every (site, month) to a file before loading anything.
  std::vector<const DatasetRef*> refs;
  std::vector<std::string> missing;
  for (const auto& site : spec.sites) {
    for (const auto& month : spec.months) {
      const auto it = std::find_if(spec.datasets.begin(), spec.datasets.end(), [&](const DatasetRef& d) {
        return d.site == site && d.month == month;
      });
      if (it == spec.datasets.end()) {
        missing.push_back("no dataset declared for " + site + "/" + month);
      } else if (!std::filesystem::is_regular_file(it->path)) {
        missing.push_back("dataset file " + it->path.string() + " (" + site + "/" + month +
                          ") does not exist");
      }
      refs.push_back(it == spec.datasets.end() ? nullptr : &*it);
    }
  }
  if (!missing.empty()) {
    std::string msg;
    for (const auto& m : missing) msg += (msg.empty() ? "" : "; ") + m;
    throw DataError(msg);
  }

  std::vector<PreparedData> prepared;
  prepared.reserve(refs.size());
  for (const DatasetRef* ref : refs) {
    const ParseResult parsed = parse_lcd_file(ref->path);
    CleanDataset ds = clean(parsed.records);
    if (spec.cyclic_wind_direction) ds = encode_wind_direction_cyclic(ds);
    prepared.push_back(prepare_data(ds, spec.train_ratio, spec.base.model.lookback));
  }

  std::vector<Job> jobs;
  for (std::size_t s = 0; s < spec.sites.size(); ++s) {
    for (std::size_t m = 0; m < spec.months.size(); ++m) {
      for (const ModelVariant& v : spec.variants) {
        jobs.push_back({s * spec.months.size() + m, v, spec.sites[s], spec.months[m]});
      }
    }
  }

  std::vector<std::optional<GridEntry>> results(jobs.size());
  std::vector<std::exception_ptr> failures(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1)) {
      try {
        const Job& job = jobs[i];
        const PreparedData& data = prepared[job.dataset];
        TrainSpec ts = spec.base;
        ts.model.cell = job.variant.cell;
        ts.model.mode = job.variant.mode;
        ts.model.input_width = data.train.front().features.cols();
        ts.site = job.site;
        ts.month = job.month;
        ExperimentReport report = train(ts, data.train, data.test);
        report.provenance = data.provenance;
        results[i] = GridEntry{std::move(report), data.scaler, data.target_column};
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::clamp<std::size_t>(spec.threads, 1, jobs.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  GridResult out;
  out.entries.reserve(results.size());
  for (auto& r : results) out.entries.push_back(std::move(*r));
  return out;
}

void write_summary_csv(const GridResult& result, std::ostream& out) {
  out << "site,month,model,train_rmse,test_rmse,train_mse,test_mse,published_train_rmse,published_test_rmse\n";
  for (const GridEntry& e : result.entries) {
    const ExperimentReport& r = e.report;
    const auto ref = published_rmse(r.site, r.month, r.model_label());
    out << csv_row({r.site, r.month, r.model_label(), format_double(r.train_rmse),
                    format_double(r.test_rmse), format_double(r.train_mse), format_double(r.test_mse),
                    ref ? fixed(ref->train, 2) : "", ref ? fixed(ref->test, 2) : ""})
        << '\n';
  }
}

void write_summary_table(const GridResult& result, std::ostream& out) {
  std::vector<std::string> sites, months, models;
  auto remember = [](std::vector<std::string>& list, const std::string& v) {
    if (std::find(list.begin(), list.end(), v) == list.end()) list.push_back(v);
  };
  std::map<std::tuple<std::string, std::string, std::string>, const ExperimentReport*> cells;
  for (const GridEntry& e : result.entries) {
    remember(sites, e.report.site);
    remember(months, e.report.month);
    remember(models, e.report.model_label());
    cells[{e.report.site, e.report.month, e.report.model_label()}] = &e.report;
  }

  constexpr std::size_t kSite = 12, kModel = 16, kCell = 15;
  auto value = [](double measured, std::optional<double> published) {
    std::string s = fixed(measured, 4);
    if (published) s += " (" + fixed(*published, 2) + ")";
    return s;
  };

  out << "RMSE in normalized units; published values in parentheses.\n\n";
  std::string line = pad("", kSite) + pad("", kModel);
  for (const auto& m : months) line += pad(m, 2 * kCell);
  out << line << '\n';
  line = pad("", kSite) + pad("Model", kModel);
  for (std::size_t i = 0; i < months.size(); ++i) line += pad("Train RMSE", kCell) + pad("Test RMSE", kCell);
  out << line << '\n';
  for (const auto& site : sites) {
    bool first = true;
    for (const auto& model : models) {
      line = pad(first ? site : "", kSite) + pad(model, kModel);
      first = false;
      for (const auto& month : months) {
        const auto it = cells.find({site, month, model});
        if (it == cells.end()) {
          line += pad("-", kCell) + pad("-", kCell);
          continue;
        }
        const auto ref = published_rmse(site, month, model);
        line += pad(value(it->second->train_rmse, ref ? std::optional(ref->train) : std::nullopt), kCell);
        line += pad(value(it->second->test_rmse, ref ? std::optional(ref->test) : std::nullopt), kCell);
      }
      while (!line.empty() && line.back() == ' ') line.pop_back();
      out << line << '\n';
    }
  }
}

}  // namespace windcast
