#include "segunc/types.hpp"

#include <cmath>
#include <string>

namespace segunc {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::SumNotOne: return "SumNotOne";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::EmptyVolume: return "EmptyVolume";
    case ErrorCode::WindowTooLarge: return "WindowTooLarge";
    case ErrorCode::CountMismatch: return "CountMismatch";
    case ErrorCode::DegenerateSeries: return "DegenerateSeries";
    case ErrorCode::DrusenOutOfBounds: return "DrusenOutOfBounds";
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::MalformedMask: return "MalformedMask";
    case ErrorCode::UnsupportedDtype: return "UnsupportedDtype";
    case ErrorCode::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

void require_same_shape(Shape a, Shape b, std::string_view what) {
  if (a != b) {
    fail(ErrorCode::ShapeMismatch, std::string(what) + ": " + std::to_string(a.height) + "x" +
                                       std::to_string(a.width) + " vs " + std::to_string(b.height) + "x" +
                                       std::to_string(b.width));
  }
}

namespace {

void require_length(std::size_t expected, std::size_t actual, std::string_view what) {
  if (expected != actual) {
    fail(ErrorCode::ShapeMismatch, std::string(what) + ": expected " + std::to_string(expected) +
                                       " values, got " + std::to_string(actual));
  }
}

}  // namespace

GrayImage::GrayImage(std::size_t height, std::size_t width, std::vector<double> data)
    : shape_{height, width}, data_(std::move(data)) {
  require_length(shape_.pixels(), data_.size(), "GrayImage");
  for (std::size_t i = 0; i < data_.size(); ++i) {
    const double v = data_[i];
    if (!std::isfinite(v)) fail(ErrorCode::NonFiniteValue, "GrayImage pixel " + std::to_string(i));
    if (v < 0.0 || v > 1.0) {
      fail(ErrorCode::OutOfRange, "GrayImage pixel " + std::to_string(i) + " = " + std::to_string(v));
    }
  }
}

GrayImage GrayImage::constant(std::size_t height, std::size_t width, double value) {
  return GrayImage(height, width, std::vector<double>(height * width, value));
}

BinaryMask::BinaryMask(std::size_t height, std::size_t width, std::vector<std::uint8_t> data)
    : shape_{height, width}, data_(std::move(data)) {
  require_length(shape_.pixels(), data_.size(), "BinaryMask");
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (data_[i] > 1) {
      fail(ErrorCode::MalformedMask, "BinaryMask pixel " + std::to_string(i) + " = " + std::to_string(data_[i]));
    }
  }
}

BinaryMask BinaryMask::zeros(std::size_t height, std::size_t width) {
  return BinaryMask(height, width, std::vector<std::uint8_t>(height * width, 0));
}

std::size_t BinaryMask::count() const noexcept {
  std::size_t n = 0;
  for (auto v : data_) n += v;
  return n;
}

std::optional<ProbMapIssue> validate_prob_map(std::size_t height, std::size_t width, std::size_t classes,
                                              std::span<const double> data, double tolerance) {
  if (classes < 2) fail(ErrorCode::InvalidArgument, "a probability map needs at least 2 classes");
  require_length(height * width * classes, data.size(), "ProbMap");
  const std::size_t pixels = height * width;
  for (std::size_t p = 0; p < pixels; ++p) {
    double sum = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
      const double v = data[p * classes + c];
      if (!std::isfinite(v)) return ProbMapIssue{ErrorCode::NonFiniteValue, p, v};
      if (v < 0.0 || v > 1.0) return ProbMapIssue{ErrorCode::OutOfRange, p, v};
      sum += v;
    }
    if (std::abs(sum - 1.0) > tolerance) return ProbMapIssue{ErrorCode::SumNotOne, p, sum};
  }
  return std::nullopt;
}

ProbMap::ProbMap(std::size_t height, std::size_t width, std::size_t classes, std::vector<double> data,
                 double tolerance)
    : shape_{height, width}, classes_(classes), tolerance_(tolerance), data_(std::move(data)) {
  if (auto issue = validate_prob_map(height, width, classes, data_, tolerance)) {
    fail(issue->code, "ProbMap pixel " + std::to_string(issue->pixel) + " value " + std::to_string(issue->value));
  }
}

std::vector<double> foreground(const ProbMap& map) {
  std::vector<double> out(map.shape().pixels());
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = map.at(p, kForegroundClass);
  return out;
}

Raster<double> lift(const GrayImage& img) { return {img.shape(), 1, {img.data().begin(), img.data().end()}}; }

Raster<double> lift(const ProbMap& map) {
  return {map.shape(), map.classes(), {map.data().begin(), map.data().end()}};
}

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::McDropout: return "mc-dropout";
    case Provenance::Tta: return "tta";
    case Provenance::External: return "external";
  }
  return "external";
}

ProbVolume::ProbVolume(std::vector<ProbMap> maps, Provenance provenance, std::vector<TransformRecord> transforms)
    : maps_(std::move(maps)), provenance_(provenance), transforms_(std::move(transforms)) {
  if (maps_.empty()) fail(ErrorCode::EmptyVolume, "a volume needs at least one pass");
  for (const auto& m : maps_) {
    require_same_shape(maps_.front().shape(), m.shape(), "ProbVolume pass");
    if (m.classes() != maps_.front().classes()) fail(ErrorCode::ShapeMismatch, "ProbVolume class counts differ");
  }
  if (provenance_ == Provenance::Tta) {
    if (transforms_.size() != maps_.size()) {
      fail(ErrorCode::CountMismatch, "tta volume has " + std::to_string(maps_.size()) + " passes but " +
                                         std::to_string(transforms_.size()) + " transforms");
    }
  } else if (!transforms_.empty()) {
    fail(ErrorCode::InvalidArgument, "transforms are only recorded for tta volumes");
  }
}

EntropyMap::EntropyMap(std::size_t height, std::size_t width, std::size_t classes, LogBase base,
                       std::vector<double> data)
    : shape_{height, width}, classes_(classes), base_(base), data_(std::move(data)) {
  if (classes_ < 2) fail(ErrorCode::InvalidArgument, "entropy map needs at least 2 classes");
  require_length(shape_.pixels(), data_.size(), "EntropyMap");
  // Slack covers per-pixel sums that are off from 1 by the ProbMap tolerance.
  const double hi = max_value() + 1e-6;
  for (std::size_t i = 0; i < data_.size(); ++i) {
    const double v = data_[i];
    if (!std::isfinite(v)) fail(ErrorCode::NonFiniteValue, "EntropyMap pixel " + std::to_string(i));
    if (v < 0.0 || v > hi) {
      fail(ErrorCode::OutOfRange, "EntropyMap pixel " + std::to_string(i) + " = " + std::to_string(v));
    }
  }
}

double EntropyMap::max_value() const noexcept {
  const double c = static_cast<double>(classes_);
  return base_ == LogBase::Bits ? std::log2(c) : std::log(c);
}

std::string_view to_string(SizeClass s) {
  switch (s) {
    case SizeClass::Large: return "large";
    case SizeClass::Medium: return "medium";
    case SizeClass::Small: return "small";
  }
  return "small";
}

std::optional<SizeClass> parse_size_class(std::string_view s) {
  if (s == "large") return SizeClass::Large;
  if (s == "medium") return SizeClass::Medium;
  if (s == "small") return SizeClass::Small;
  return std::nullopt;
}

SizeThresholds::SizeThresholds(std::size_t t1, std::size_t t2) : small_below(t1), large_from(t2) {
  if (t1 == 0 || t2 <= t1) {
    fail(ErrorCode::InvalidArgument,
         "size thresholds must be positive and strictly increasing: " + std::to_string(t1) + ", " + std::to_string(t2));
  }
}

}  // namespace segunc
