#include "pcgcn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

namespace pcgcn {
namespace {

template <typename T>
void put(std::ostream& out, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  static_assert(sizeof(T) == sizeof(U));
  U bits = 0;
  std::memcpy(&bits, &value, sizeof bits);
  unsigned char bytes[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
  out.write(reinterpret_cast<const char*>(bytes), sizeof bytes);
}

template <typename T>
T get(std::istream& in, const std::filesystem::path& path) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  unsigned char bytes[sizeof(U)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof bytes)) {
    throw std::runtime_error("checkpoint " + path.string() + " is truncated");
  }
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) bits |= static_cast<U>(bytes[i]) << (8 * i);
  T value;
  std::memcpy(&value, &bits, sizeof value);
  return value;
}

}  // namespace

void write_checkpoint(const std::filesystem::path& path, std::uint64_t magic, std::span<const std::int32_t> meta,
                      std::span<const Matrix* const> arrays) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  put(out, magic);
  put(out, kCheckpointVersion);
  put(out, static_cast<std::uint32_t>(arrays.size()));
  put(out, static_cast<std::uint32_t>(meta.size()));
  for (auto m : meta) put(out, m);
  for (const auto* a : arrays) {
    put(out, static_cast<std::uint64_t>(a->rows()));
    put(out, static_cast<std::uint64_t>(a->cols()));
  }
  for (const auto* a : arrays) {
    for (Eigen::Index i = 0; i < a->size(); ++i) put(out, a->data()[i]);
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

Checkpoint read_checkpoint(const std::filesystem::path& path, std::uint64_t expected_magic) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  if (get<std::uint64_t>(in, path) != expected_magic) {
    throw std::runtime_error(path.string() + " is not the expected kind of checkpoint");
  }
  const auto version = get<std::uint32_t>(in, path);
  if (version != kCheckpointVersion) {
    throw std::runtime_error(path.string() + ": unsupported checkpoint version " + std::to_string(version));
  }
  const auto count = get<std::uint32_t>(in, path);
  const auto meta_count = get<std::uint32_t>(in, path);
  Checkpoint ck;
  for (std::uint32_t i = 0; i < meta_count; ++i) ck.meta.push_back(get<std::int32_t>(in, path));
  std::vector<std::pair<std::uint64_t, std::uint64_t>> shapes;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto r = get<std::uint64_t>(in, path);
    const auto c = get<std::uint64_t>(in, path);
    if (r > (1u << 30) || c > (1u << 30)) throw std::runtime_error(path.string() + ": implausible array shape");
    shapes.emplace_back(r, c);
  }
  for (auto [r, c] : shapes) {
    Matrix m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = get<double>(in, path);
    ck.arrays.push_back(std::move(m));
  }
  return ck;
}

// Metadata: head, layer count, then (kind, relu) per layer.
void save_gcn(const std::filesystem::path& path, const nn::GcnModel& model) {
  std::vector<std::int32_t> meta{static_cast<std::int32_t>(model.head), static_cast<std::int32_t>(model.layers.size())};
  for (const auto& layer : model.layers) {
    meta.push_back(static_cast<std::int32_t>(layer.kind));
    meta.push_back(layer.relu ? 1 : 0);
  }
  const auto params = model.parameters();
  write_checkpoint(path, kGcnMagic, meta, params);
}

nn::GcnModel load_gcn(const std::filesystem::path& path) {
  Checkpoint ck = read_checkpoint(path, kGcnMagic);
  const auto bad = [&] { return std::runtime_error(path.string() + ": malformed model checkpoint"); };
  if (ck.meta.size() < 2) throw bad();
  nn::GcnModel model;
  model.head = static_cast<nn::Head>(ck.meta[0]);
  const auto num_layers = static_cast<std::size_t>(ck.meta[1]);
  if (ck.meta.size() != 2 + 2 * num_layers) throw bad();
  std::size_t next = 0;
  for (std::size_t l = 0; l < num_layers; ++l) {
    nn::GcnLayer layer;
    layer.kind = static_cast<nn::LayerKind>(ck.meta[2 + 2 * l]);
    layer.relu = ck.meta[3 + 2 * l] != 0;
    const std::size_t count = layer.kind == nn::LayerKind::kHogcn ? 3 : 1;
    if (next + count > ck.arrays.size()) throw bad();
    for (std::size_t i = 0; i < count; ++i) layer.weights.push_back(std::move(ck.arrays[next++]));
    model.layers.push_back(std::move(layer));
  }
  if (next != ck.arrays.size()) throw bad();
  return model;
}

}  // namespace pcgcn
