#include "segunc/patching.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace segunc {

std::vector<std::size_t> axis_anchors(std::size_t extent, std::size_t window, std::size_t stride) {
  std::vector<std::size_t> anchors;
  std::size_t a = 0;
  for (; a + window <= extent; a += stride) anchors.push_back(a);
  if (anchors.back() + window < extent) anchors.push_back(extent - window);
  return anchors;
}

PatchGrid plan_grid(std::size_t height, std::size_t width, std::size_t window, std::size_t stride) {
  if (window == 0) fail(ErrorCode::InvalidArgument, "window must be positive");
  if (window > height || window > width) {
    fail(ErrorCode::WindowTooLarge, "window " + std::to_string(window) + " exceeds image " +
                                        std::to_string(height) + "x" + std::to_string(width));
  }
  if (stride < 1 || stride > window) {
    fail(ErrorCode::InvalidArgument, "stride must lie in [1, window], got " + std::to_string(stride));
  }
  PatchGrid grid{window, stride, {height, width}, {}};
  const auto rows = axis_anchors(height, window, stride);
  const auto cols = axis_anchors(width, window, stride);
  grid.origins.reserve(rows.size() * cols.size());
  for (auto r : rows) {
    for (auto c : cols) grid.origins.push_back({r, c});
  }
  return grid;
}

namespace {

template <typename T>
std::vector<T> crop_values(std::span<const T> src, Shape shape, std::size_t channels, PatchOrigin at,
                           std::size_t window) {
  if (at.row + window > shape.height || at.col + window > shape.width) {
    fail(ErrorCode::ShapeMismatch, "patch at (" + std::to_string(at.row) + "," + std::to_string(at.col) +
                                       ") leaves the source");
  }
  std::vector<T> out;
  out.reserve(window * window * channels);
  for (std::size_t r = 0; r < window; ++r) {
    const auto begin = src.begin() + static_cast<std::ptrdiff_t>(((at.row + r) * shape.width + at.col) * channels);
    out.insert(out.end(), begin, begin + static_cast<std::ptrdiff_t>(window * channels));
  }
  return out;
}

}  // namespace

GrayImage crop(const GrayImage& img, PatchOrigin at, std::size_t window) {
  return GrayImage(window, window, crop_values(img.data(), img.shape(), 1, at, window));
}

BinaryMask crop(const BinaryMask& mask, PatchOrigin at, std::size_t window) {
  return BinaryMask(window, window, crop_values(mask.data(), mask.shape(), 1, at, window));
}

ProbMap crop(const ProbMap& map, PatchOrigin at, std::size_t window) {
  return ProbMap(window, window, map.classes(), crop_values(map.data(), map.shape(), map.classes(), at, window),
                 map.tolerance());
}

EntropyMap crop(const EntropyMap& ent, PatchOrigin at, std::size_t window) {
  return EntropyMap(window, window, ent.classes(), ent.base(), crop_values(ent.data(), ent.shape(), 1, at, window));
}

std::vector<GrayImage> extract(const GrayImage& img, const PatchGrid& grid) {
  require_same_shape(grid.source, img.shape(), "extract: grid planned for another shape");
  std::vector<GrayImage> patches;
  patches.reserve(grid.origins.size());
  for (const auto& o : grid.origins) patches.push_back(crop(img, o, grid.window));
  return patches;
}

ProbMap stitch(std::span<const ProbMap> patches, const PatchGrid& grid) {
  if (patches.size() != grid.origins.size()) {
    fail(ErrorCode::CountMismatch, std::to_string(patches.size()) + " patches for " +
                                       std::to_string(grid.origins.size()) + " origins");
  }
  if (patches.empty()) fail(ErrorCode::CountMismatch, "stitch needs at least one patch");
  const std::size_t classes = patches.front().classes();
  const std::size_t w = grid.source.width;
  std::vector<double> acc(grid.source.pixels() * classes, 0.0);
  std::vector<std::size_t> hits(grid.source.pixels(), 0);
  // Accumulate in (row, col) origin order so the result does not depend on
  // the order patches are handed in.
  std::vector<std::size_t> order(patches.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& oa = grid.origins[a];
    const auto& ob = grid.origins[b];
    return oa.row != ob.row ? oa.row < ob.row : oa.col < ob.col;
  });
  for (std::size_t i : order) {
    const auto& patch = patches[i];
    require_same_shape({grid.window, grid.window}, patch.shape(), "stitch: patch");
    if (patch.classes() != classes) fail(ErrorCode::ShapeMismatch, "stitch: class counts differ");
    const auto& o = grid.origins[i];
    for (std::size_t r = 0; r < grid.window; ++r) {
      for (std::size_t c = 0; c < grid.window; ++c) {
        const std::size_t dst = (o.row + r) * w + (o.col + c);
        const auto src = patch.pixel(r * grid.window + c);
        for (std::size_t k = 0; k < classes; ++k) acc[dst * classes + k] += src[k];
        ++hits[dst];
      }
    }
  }
  for (std::size_t p = 0; p < hits.size(); ++p) {
    double sum = 0.0;
    for (std::size_t k = 0; k < classes; ++k) {
      acc[p * classes + k] /= static_cast<double>(hits[p]);
      sum += acc[p * classes + k];
    }
    for (std::size_t k = 0; k < classes; ++k) acc[p * classes + k] /= sum;
  }
  return ProbMap(grid.source.height, grid.source.width, classes, std::move(acc));
}

}  // namespace segunc
