// SPDX-License-Identifier: Apache-2.0
#include "windcast/reference_table.hpp"

#include <array>
#include <cctype>
#include <string>

namespace windcast {

namespace {

struct Entry {
  std::string_view site;
  std::string_view model;
  ReferenceRmse january;
  ReferenceRmse july;
  ReferenceRmse october;
};

constexpr std::array<Entry, 8> kTable = {{
    {"starkville", "stateless lstm", {0.15, 0.19}, {0.07, 0.09}, {0.14, 0.32}},
    {"starkville", "stateful lstm", {0.91, 1.15}, {2.73, 3.09}, {1.03, 3.02}},
    {"starkville", "stateless gru", {0.16, 0.20}, {0.29, 0.32}, {1.41, 2.79}},
    {"starkville", "stateful gru", {1.01, 0.71}, {0.53, 1.29}, {1.04, 1.41}},
    {"meridian", "stateless lstm", {0.27, 0.21}, {0.06, 0.13}, {0.15, 0.16}},
    {"meridian", "stateful lstm", {1.10, 0.48}, {0.18, 0.27}, {0.29, 0.33}},
    {"meridian", "stateless gru", {0.50, 0.59}, {0.09, 0.16}, {0.58, 0.61}},
    {"meridian", "stateful gru", {0.62, 0.94}, {0.64, 0.75}, {1.03, 0.77}},
}};

std::string normalize(std::string_view s, bool first_word_only) {
  std::string out;
  for (char c : s) {
    if (first_word_only && (c == ' ' || c == '_' || c == '-') && !out.empty()) break;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

}  // namespace

std::optional<ReferenceRmse> published_rmse(std::string_view site, std::string_view month,
                                            std::string_view model) {
  const std::string s = normalize(site, true);
  const std::string m = normalize(month, true);
  const std::string label = normalize(model, false);
  for (const Entry& e : kTable) {
    if (e.site != s || e.model != label) continue;
    if (m == "january" || m == "jan") return e.january;
    if (m == "july" || m == "jul") return e.july;
    if (m == "october" || m == "oct") return e.october;
    return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace windcast
