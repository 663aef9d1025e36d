#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "segunc/error.hpp"
#include "segunc/transform_record.hpp"

namespace segunc {

/// Class index of the drusen (foreground) channel. Class 0 is background.
constexpr std::size_t kForegroundClass = 1;

struct Shape {
  std::size_t height = 0;
  std::size_t width = 0;

  std::size_t pixels() const noexcept { return height * width; }
  bool operator==(const Shape&) const = default;
};

void require_same_shape(Shape a, Shape b, std::string_view what);

/// Single-channel intensity raster, row-major, values in [0, 1].
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(std::size_t height, std::size_t width, std::vector<double> data);

  static GrayImage constant(std::size_t height, std::size_t width, double value);

  Shape shape() const noexcept { return shape_; }
  std::size_t height() const noexcept { return shape_.height; }
  std::size_t width() const noexcept { return shape_.width; }
  std::span<const double> data() const noexcept { return data_; }
  double at(std::size_t row, std::size_t col) const { return data_[row * shape_.width + col]; }

  bool operator==(const GrayImage&) const = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

/// Row-major {0,1} labels, 1 = drusen.
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(std::size_t height, std::size_t width, std::vector<std::uint8_t> data);

  static BinaryMask zeros(std::size_t height, std::size_t width);

  Shape shape() const noexcept { return shape_; }
  std::size_t height() const noexcept { return shape_.height; }
  std::size_t width() const noexcept { return shape_.width; }
  std::span<const std::uint8_t> data() const noexcept { return data_; }
  std::uint8_t at(std::size_t row, std::size_t col) const { return data_[row * shape_.width + col]; }
  std::size_t count() const noexcept;

  bool operator==(const BinaryMask&) const = default;

 private:
  Shape shape_;
  std::vector<std::uint8_t> data_;
};

/// First offending pixel found by validate_prob_map.
struct ProbMapIssue {
  ErrorCode code;
  std::size_t pixel;
  double value;  // the offending probability, or the pixel sum for SumNotOne
};

/// Checks per-pixel probabilities: finite, in [0,1], summing to 1 within
/// `tolerance`. Layout is pixel-major: data[pixel * classes + class].
/// Returns nullopt when the data is a valid map.
std::optional<ProbMapIssue> validate_prob_map(std::size_t height, std::size_t width, std::size_t classes,
                                              std::span<const double> data, double tolerance = 1e-6);

/// Per-pixel class distribution, pixel-major layout. Immutable.
class ProbMap {
 public:
  static constexpr double kSumTolerance = 1e-6;

  ProbMap() = default;
  /// Throws on any invariant violation; nothing is clamped or renormalized.
  ProbMap(std::size_t height, std::size_t width, std::size_t classes, std::vector<double> data,
          double tolerance = kSumTolerance);

  Shape shape() const noexcept { return shape_; }
  std::size_t height() const noexcept { return shape_.height; }
  std::size_t width() const noexcept { return shape_.width; }
  std::size_t classes() const noexcept { return classes_; }
  /// Sum tolerance the map was validated with; derived maps inherit it.
  double tolerance() const noexcept { return tolerance_; }
  std::span<const double> data() const noexcept { return data_; }
  std::span<const double> pixel(std::size_t index) const { return {data_.data() + index * classes_, classes_}; }
  double at(std::size_t index, std::size_t cls) const { return data_[index * classes_ + cls]; }

  /// Equal shape and bit-identical probabilities.
  bool operator==(const ProbMap& other) const {
    return shape_ == other.shape_ && classes_ == other.classes_ && data_ == other.data_;
  }

 private:
  Shape shape_;
  std::size_t classes_ = 0;
  double tolerance_ = kSumTolerance;
  std::vector<double> data_;
};

/// Drusen-class probability of every pixel, row-major.
std::vector<double> foreground(const ProbMap& map);

/// Untyped multi-channel raster, pixel-major. Used for exact pixel
/// permutations shared by images, masks and probability maps.
template <typename T>
struct Raster {
  Shape shape;
  std::size_t channels = 1;
  std::vector<T> data;

  bool operator==(const Raster&) const = default;
};

/// Embeds an image as a one-channel raster.
Raster<double> lift(const GrayImage& img);
Raster<double> lift(const ProbMap& map);

enum class Provenance { McDropout, Tta, External };

std::string_view to_string(Provenance p);

/// T per-pass softmax maps of identical shape. For Tta provenance each map is
/// already back-transformed to input geometry and `transforms` has length T.
class ProbVolume {
 public:
  ProbVolume(std::vector<ProbMap> maps, Provenance provenance, std::vector<TransformRecord> transforms = {});

  std::size_t passes() const noexcept { return maps_.size(); }
  Shape shape() const noexcept { return maps_.front().shape(); }
  std::size_t classes() const noexcept { return maps_.front().classes(); }
  std::span<const ProbMap> maps() const noexcept { return maps_; }
  const ProbMap& map(std::size_t t) const { return maps_.at(t); }
  Provenance provenance() const noexcept { return provenance_; }
  std::span<const TransformRecord> transforms() const noexcept { return transforms_; }

 private:
  std::vector<ProbMap> maps_;
  Provenance provenance_;
  std::vector<TransformRecord> transforms_;
};

enum class LogBase { Bits, Nats };

/// Pixel-wise predictive entropy, row-major, in [0, log C] of the chosen base.
class EntropyMap {
 public:
  EntropyMap() = default;
  EntropyMap(std::size_t height, std::size_t width, std::size_t classes, LogBase base, std::vector<double> data);

  Shape shape() const noexcept { return shape_; }
  std::size_t height() const noexcept { return shape_.height; }
  std::size_t width() const noexcept { return shape_.width; }
  std::size_t classes() const noexcept { return classes_; }
  LogBase base() const noexcept { return base_; }
  /// log C in the map's base: the largest attainable entropy.
  double max_value() const noexcept;
  std::span<const double> data() const noexcept { return data_; }
  double at(std::size_t row, std::size_t col) const { return data_[row * shape_.width + col]; }

 private:
  Shape shape_;
  std::size_t classes_ = 0;
  LogBase base_ = LogBase::Bits;
  std::vector<double> data_;
};

enum class SizeClass { Large, Medium, Small };

std::string_view to_string(SizeClass s);
std::optional<SizeClass> parse_size_class(std::string_view s);

/// Drusen-pixel-count boundaries: Small below `small_below`, Large from `large_from`.
struct SizeThresholds {
  std::size_t small_below = 0;
  std::size_t large_from = 0;

  SizeThresholds() = default;
  SizeThresholds(std::size_t t1, std::size_t t2);
};

/// Dice/precision/recall. Precision or recall is nullopt when its ratio is 0/0
/// (undefined); `degenerate` marks the empty-prediction/empty-truth case
/// where all three are defined as 1.
struct Metrics {
  double dice = 0.0;
  std::optional<double> precision;
  std::optional<double> recall;
  bool degenerate = false;
};

struct EvalReport {
  Metrics plain;
  Metrics thresholded;
  double u_avg = 0.0;
  std::size_t u_avg_pixels = 0;
  bool u_avg_empty = false;
  double cutoff = 0.0;
  double excluded_fraction = 0.0;
  std::optional<SizeClass> size_class;
  std::optional<std::size_t> pass_count;
};

}  // namespace segunc
