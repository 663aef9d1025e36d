#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "segunc/transform_record.hpp"
#include "segunc/types.hpp"

namespace segunc {

/// Horizontal band starting at `top` (inclusive) and running to the next band.
struct Layer {
  std::size_t top = 0;
  double intensity = 0.0;
};

/// Elliptical lesion sitting on a layer boundary. Radii in pixels; the
/// interior is filled with `amplitude` and the layers above are lifted by
/// the ellipse's upper half.
struct Drusen {
  double center_row = 0.0;
  double center_col = 0.0;
  double radius_row = 1.0;
  double radius_col = 1.0;
  double amplitude = 0.8;
};

struct SceneSpec {
  std::size_t height = 128;
  std::size_t width = 128;
  std::vector<Layer> layers;  // ascending `top`, first at row 0
  std::vector<Drusen> drusen;
  double speckle_sigma = 0.0;
  std::uint64_t seed = 0;
};

struct Scene {
  GrayImage image;
  BinaryMask mask;
};

/// Throws DrusenOutOfBounds when a lesion leaves the image, InvalidArgument
/// on bad layers or a negative speckle level.
void validate(const SceneSpec& spec);

/// Banded image with bump deformation at lesion sites and multiplicative
/// speckle; the mask marks the ellipse interiors. Deterministic in the seed.
Scene generate_scene(const SceneSpec& spec);

/// Knobs for random_scene_spec.
struct SceneOptions {
  std::size_t height = 128;
  std::size_t width = 128;
  std::size_t min_drusen = 1;
  std::size_t max_drusen = 3;
  double min_radius_col = 4.0;
  double max_radius_col = 16.0;
  /// radius_row = radius_col * aspect, aspect drawn from this range.
  double min_aspect = 0.4;
  double max_aspect = 0.8;
  double speckle_sigma = 0.15;
};

/// Typical retinal band layout for the given height.
std::vector<Layer> default_layers(std::size_t height);

/// Random lesion count, sizes and positions on the default layout.
SceneSpec random_scene_spec(std::uint64_t seed, const SceneOptions& options = {});

/// Stochastic stand-in for a dropout network. The drusen logit of a pixel is
///   signed_distance / softness + sigma_model * eta_t + gain * perturbation
/// where the signed distance to the truth boundary is positive inside,
/// eta_t is a standard normal drawn from (seed, pass, pixel), and the
/// perturbation is local_perturbation(image, seed).
struct MockPredictorSpec {
  static constexpr double kPerturbationUnit = 0.1;

  double sigma_model = 1.0;
  double gain = 0.0;
  double softness = 1.0;
  std::uint64_t seed = 0;
};

void validate(const MockPredictorSpec& spec);

/// Signed Euclidean distance to the mask boundary, +0.5 on the first inside
/// ring and -0.5 on the first outside ring.
std::vector<double> signed_boundary_distance(const BinaryMask& mask);

/// Zero-sum, unit-norm 3x3 taps drawn from `seed` (row-major). The filter has
/// no rotational symmetry, so its response changes under rotations and flips
/// of the input the way a trained network's filters do.
std::array<double, 9> perturbation_filter(std::uint64_t seed);

/// Response of perturbation_filter(seed) over the reflect-padded image, in
/// perturbation units. Constant images and brightness offsets give zero.
std::vector<double> local_perturbation(const GrayImage& img, std::uint64_t seed);

ProbMap mock_predict(const MockPredictorSpec& spec, const GrayImage& img, const BinaryMask& gt,
                     std::size_t pass_index);

/// T passes on a fixed input with varying pass index.
ProbVolume run_mc(const MockPredictorSpec& spec, const GrayImage& img, const BinaryMask& gt, std::size_t passes);

/// One pass (index 0) per transform on M_t(x), each map mapped back through M_t^-1.
ProbVolume run_tta(const MockPredictorSpec& spec, const GrayImage& img, const BinaryMask& gt,
                   std::span<const TransformRecord> transforms);

/// Samples one transform per seed, then runs as above.
ProbVolume run_tta(const MockPredictorSpec& spec, const GrayImage& img, const BinaryMask& gt, std::size_t passes,
                   std::span<const std::uint64_t> transform_seeds, const TransformRanges& ranges = {});

/// Transform seeds derived from a base seed, one per pass.
std::vector<std::uint64_t> derive_seeds(std::uint64_t base, std::size_t count);

}  // namespace segunc
