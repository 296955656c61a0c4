// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "windcast/config.hpp"
#include "windcast/optim.hpp"

namespace windcast {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,
  kExitData = 2,
  kExitDivergence = 3,
};

struct VariantCheck {
  std::string label;
  GradCheckResult result;
};

/// Gradient check of all four stacked variants at the configured small size.
/// Stateful variants are checked from a non-zero carried state.
std::vector<VariantCheck> gradcheck_all_variants(const GradcheckSettings& settings, std::uint64_t seed);

/// Entry point of the `windcast` tool: ingest, train, grid, gradcheck.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace windcast
