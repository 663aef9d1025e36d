#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "segunc/types.hpp"

namespace segunc {

enum class NpyDtype { Float32, Float64 };

/// Strict accepts only little-endian float32; lenient also widens float64.
enum class DtypePolicy { Strict, Lenient };

/// C-order array with values widened to double.
struct NpyArray {
  std::vector<std::size_t> shape;
  NpyDtype dtype = NpyDtype::Float32;
  std::vector<double> data;
};

/// NPY v1.0 bytes for the given array. Values are narrowed when dtype is Float32.
std::vector<char> encode_npy(std::span<const std::size_t> shape, std::span<const double> data, NpyDtype dtype);
NpyArray decode_npy(std::span<const char> bytes, DtypePolicy policy = DtypePolicy::Strict);

void write_npy(const std::filesystem::path& path, std::span<const std::size_t> shape, std::span<const double> data,
               NpyDtype dtype = NpyDtype::Float32);
NpyArray read_npy(const std::filesystem::path& path, DtypePolicy policy = DtypePolicy::Strict);

/// Per-(t, h, w) class sums must be within this of 1 in volume files.
constexpr double kVolumeSumTolerance = 1e-5;

/// [T, C, H, W] float32.
void write_volume(const std::filesystem::path& path, const ProbVolume& vol);
ProbVolume read_volume(const std::filesystem::path& path, DtypePolicy policy = DtypePolicy::Strict,
                       Provenance provenance = Provenance::External, std::vector<TransformRecord> transforms = {});
ProbVolume volume_from_array(const NpyArray& array, Provenance provenance = Provenance::External,
                             std::vector<TransformRecord> transforms = {});

/// [C, H, W] float32.
void write_prob_map(const std::filesystem::path& path, const ProbMap& map);
ProbMap read_prob_map(const std::filesystem::path& path, DtypePolicy policy = DtypePolicy::Strict);

/// [H, W] float64. Class count and base travel alongside (see the quantify summary).
void write_entropy(const std::filesystem::path& path, const EntropyMap& ent);
EntropyMap read_entropy(const std::filesystem::path& path, std::size_t classes, LogBase base);

}  // namespace segunc
