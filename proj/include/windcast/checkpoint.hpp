// SPDX-License-Identifier: Apache-2.0
//
// Checkpoint layout, version 1. All integers are little-endian; doubles are
// IEEE-754 binary64 stored little-endian, so a write/read cycle is bit-exact.
//
//   8 bytes   magic "WCASTCKP"
//   u32       version (1)
//   u32       cell kind (0 = LSTM, 1 = GRU)
//   u32       state mode (0 = stateless, 1 = stateful)
//   u64 x 4   layers, input_width, hidden_width, lookback
//   u64       seed
//   u64       tensor count N
//   N times:  u64 rows, u64 cols, rows*cols f64   (ParameterSet::tensors() order)
//   u64       layer count L
//   L times:  h tensor, then c tensor (rows = cols = 0 when absent)
#pragma once

#include <filesystem>
#include <iosfwd>

#include "windcast/network.hpp"

namespace windcast {

void write_checkpoint(const StackedModel& model, std::ostream& out);
StackedModel read_checkpoint(std::istream& in);

void save_checkpoint(const StackedModel& model, const std::filesystem::path& path);
StackedModel load_checkpoint(const std::filesystem::path& path);

}  // namespace windcast
