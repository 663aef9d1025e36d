#pragma once

#include <cstdint>

#include "segunc/transform_record.hpp"
#include "segunc/types.hpp"

namespace segunc {

/// Draws one transform from `seed`: kind uniform over the five kinds,
/// parameters uniform over `ranges`. Deterministic in the seed.
TransformRecord sample_transform(std::uint64_t seed, const TransformRanges& ranges = {});

/// Shape of an image of `source` shape after `t`.
Shape transformed_shape(const TransformRecord& t, Shape source);

/// M_t(x). Rotations and flips permute pixels exactly; photometric transforms
/// clamp their output to [0, 1].
GrayImage apply(const TransformRecord& t, const GrayImage& img);

/// Geometric transforms permute the labels; photometric ones leave a mask as is.
BinaryMask apply(const TransformRecord& t, const BinaryMask& mask);

/// Geometric part of `t` on an arbitrary raster (identity for photometric kinds).
Raster<double> apply_geometry(const TransformRecord& t, const Raster<double>& r);

/// M_t^-1 on a prediction. Geometric transforms get the exact inverse
/// permutation on every class channel; photometric ones return the input.
Raster<double> invert(const TransformRecord& t, const Raster<double>& r);
ProbMap invert(const TransformRecord& t, const ProbMap& map);

/// As above, but first checks that `map` has the shape `source` takes under `t`.
ProbMap invert(const TransformRecord& t, const ProbMap& map, Shape source);

/// Normalized 1-D Gaussian taps, radius ceil(3 sigma).
std::vector<double> gaussian_kernel(double sigma);

}  // namespace segunc
