#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "pcgcn/nn.hpp"

namespace pcgcn {

/// Magic values identifying what a checkpoint holds.
inline constexpr std::uint64_t kGcnMagic = 0x4e4347434e434750ULL;     // "PGCNCGCN"
inline constexpr std::uint64_t kPolicyMagic = 0x594c4f504e434750ULL;  // "PGCNPOLY"
inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Raw checkpoint contents: integer metadata followed by shaped float64 arrays.
///
/// Layout (all little-endian): u64 magic, u32 version, u32 array count,
/// u32 metadata count, i32 metadata..., then (u64 rows, u64 cols) per array,
/// then every array's row-major data as float64.
struct Checkpoint {
  std::vector<std::int32_t> meta;
  std::vector<Matrix> arrays;
};

void write_checkpoint(const std::filesystem::path& path, std::uint64_t magic, std::span<const std::int32_t> meta,
                      std::span<const Matrix* const> arrays);
/// Throws std::runtime_error on a bad magic, version or truncated file.
Checkpoint read_checkpoint(const std::filesystem::path& path, std::uint64_t expected_magic);

void save_gcn(const std::filesystem::path& path, const nn::GcnModel& model);
nn::GcnModel load_gcn(const std::filesystem::path& path);

}  // namespace pcgcn
