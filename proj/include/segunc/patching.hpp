#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "segunc/types.hpp"

namespace segunc {

/// Window sizes used for patch extraction; tests tile with the smallest.
constexpr std::array<std::size_t, 3> kStandardWindows{128, 192, 256};

struct PatchOrigin {
  std::size_t row = 0;
  std::size_t col = 0;

  bool operator==(const PatchOrigin&) const = default;
};

/// Square windows anchored on a regular grid. The last anchor of each axis is
/// snapped inward so every window lies inside the source and every source
/// pixel is covered.
struct PatchGrid {
  std::size_t window = 0;
  std::size_t stride = 0;
  Shape source;
  std::vector<PatchOrigin> origins;  // row-major over (row anchor, col anchor)
};

/// Anchors along one axis of length `extent`.
std::vector<std::size_t> axis_anchors(std::size_t extent, std::size_t window, std::size_t stride);

/// Throws WindowTooLarge when window > min(h, w), InvalidArgument on a bad stride.
PatchGrid plan_grid(std::size_t height, std::size_t width, std::size_t window, std::size_t stride);

std::vector<GrayImage> extract(const GrayImage& img, const PatchGrid& grid);

GrayImage crop(const GrayImage& img, PatchOrigin at, std::size_t window);
BinaryMask crop(const BinaryMask& mask, PatchOrigin at, std::size_t window);
ProbMap crop(const ProbMap& map, PatchOrigin at, std::size_t window);
EntropyMap crop(const EntropyMap& ent, PatchOrigin at, std::size_t window);

/// Per source pixel, mean over the covering patches in origin order, then
/// renormalized to sum to 1.
ProbMap stitch(std::span<const ProbMap> patches, const PatchGrid& grid);

}  // namespace segunc
