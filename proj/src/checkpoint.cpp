// SPDX-License-Identifier: Apache-2.0
#include "windcast/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "windcast/error.hpp"

namespace windcast {

namespace {

constexpr std::array<char, 8> kMagic = {'W', 'C', 'A', 'S', 'T', 'C', 'K', 'P'};
constexpr std::uint32_t kVersion = 1;
// Guards allocation against corrupt size fields.
constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 32;

template <typename UInt>
void put(std::ostream& out, UInt v) {
  std::array<char, sizeof(UInt)> bytes;
  for (std::size_t i = 0; i < sizeof(UInt); ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(bytes.data(), bytes.size());
}

template <typename UInt>
UInt get(std::istream& in) {
  std::array<unsigned char, sizeof(UInt)> bytes;
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw FormatError("checkpoint: truncated file");
  UInt v = 0;
  for (std::size_t i = 0; i < sizeof(UInt); ++i) v |= static_cast<UInt>(bytes[i]) << (8 * i);
  return v;
}

void put_tensor(std::ostream& out, const Tensor2& t) {
  put<std::uint64_t>(out, t.rows());
  put<std::uint64_t>(out, t.cols());
  for (double v : t.data()) put<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
}

Tensor2 get_tensor(std::istream& in) {
  const auto rows = get<std::uint64_t>(in);
  const auto cols = get<std::uint64_t>(in);
  if (rows == 0 && cols == 0) return {};
  if (rows == 0 || cols == 0 || rows > kMaxElements / cols) {
    throw FormatError("checkpoint: invalid tensor shape " + std::to_string(rows) + "x" +
                      std::to_string(cols));
  }
  std::vector<double> data(rows * cols);
  for (double& v : data) v = std::bit_cast<double>(get<std::uint64_t>(in));
  return Tensor2(rows, cols, std::move(data));
}

}  // namespace

void write_checkpoint(const StackedModel& model, std::ostream& out) {
  const ModelConfig& c = model.config();
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, c.cell == CellKind::Lstm ? 0 : 1);
  put<std::uint32_t>(out, c.mode == StateMode::Stateless ? 0 : 1);
  put<std::uint64_t>(out, c.layers);
  put<std::uint64_t>(out, c.input_width);
  put<std::uint64_t>(out, c.hidden_width);
  put<std::uint64_t>(out, c.lookback);
  put<std::uint64_t>(out, c.seed);
  const auto tensors = model.params().tensors();
  put<std::uint64_t>(out, tensors.size());
  for (const Tensor2* t : tensors) put_tensor(out, *t);
  put<std::uint64_t>(out, model.persisted_states().size());
  for (const CellState& s : model.persisted_states()) {
    put_tensor(out, s.h);
    put_tensor(out, s.c);
  }
  if (!out) throw Error("checkpoint: write failed");
}

StackedModel read_checkpoint(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw FormatError("checkpoint: bad magic");
  const auto version = get<std::uint32_t>(in);
  if (version != kVersion) {
    throw FormatError("checkpoint: unsupported version " + std::to_string(version));
  }
  ModelConfig c;
  const auto cell = get<std::uint32_t>(in);
  const auto mode = get<std::uint32_t>(in);
  if (cell > 1 || mode > 1) throw FormatError("checkpoint: invalid cell kind or mode");
  c.cell = cell == 0 ? CellKind::Lstm : CellKind::Gru;
  c.mode = mode == 0 ? StateMode::Stateless : StateMode::Stateful;
  c.layers = get<std::uint64_t>(in);
  c.input_width = get<std::uint64_t>(in);
  c.hidden_width = get<std::uint64_t>(in);
  c.lookback = get<std::uint64_t>(in);
  c.seed = get<std::uint64_t>(in);
  if (c.layers == 0 || c.layers > 4096) throw FormatError("checkpoint: invalid layer count");

  // Build a correctly shaped skeleton, then overwrite its tensors in canonical order.
  ParameterSet params;
  for (std::size_t k = 0; k < c.layers; ++k) {
    const std::size_t d_in = k == 0 ? c.input_width : c.hidden_width;
    if (c.cell == CellKind::Lstm) {
      params.layers.emplace_back(LstmParams::zeros(d_in, c.hidden_width));
    } else {
      params.layers.emplace_back(GruParams::zeros(d_in, c.hidden_width));
    }
  }
  params.head_weights = Tensor2(1, c.hidden_width);
  params.head_bias = Tensor2(1, 1);

  auto slots = params.tensors();
  const auto count = get<std::uint64_t>(in);
  if (count != slots.size()) {
    throw FormatError("checkpoint: expected " + std::to_string(slots.size()) + " tensors, found " +
                      std::to_string(count));
  }
  for (Tensor2* slot : slots) {
    Tensor2 t = get_tensor(in);
    if (!t.same_shape(*slot)) {
      throw FormatError("checkpoint: tensor shape " + t.shape_string() + " where " +
                        slot->shape_string() + " expected");
    }
    *slot = std::move(t);
  }
  StackedModel model(c, std::move(params));

  const auto n_states = get<std::uint64_t>(in);
  if (n_states != c.layers) throw FormatError("checkpoint: state count does not match layers");
  std::vector<CellState> states(n_states);
  for (auto& s : states) {
    s.h = get_tensor(in);
    s.c = get_tensor(in);
  }
  try {
    model.set_persisted_states(std::move(states));
  } catch (const DimensionError& e) {
    throw FormatError(std::string("checkpoint: ") + e.what());
  }
  return model;
}

void save_checkpoint(const StackedModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_checkpoint(model, out);
}

StackedModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open checkpoint " + path.string());
  return read_checkpoint(in);
}

}  // namespace windcast
