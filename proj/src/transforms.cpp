#include "segunc/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "segunc/rng.hpp"

namespace segunc {

std::string_view to_string(TransformKind kind) {
  switch (kind) {
    case TransformKind::Rotate90: return "rotate90";
    case TransformKind::HorizontalFlip: return "horizontal-flip";
    case TransformKind::Brightness: return "brightness";
    case TransformKind::Contrast: return "contrast";
    case TransformKind::GaussianBlur: return "gaussian-blur";
  }
  return "rotate90";
}

std::string_view to_string(Invertibility inv) {
  return inv == Invertibility::Geometric ? "geometric" : "photometric";
}

void validate(const TransformRecord& t, const TransformRanges& ranges) {
  auto in = [](double v, double lo, double hi) { return std::isfinite(v) && v >= lo && v <= hi; };
  bool ok = true;
  switch (t.kind) {
    case TransformKind::Rotate90: ok = t.quarter_turns >= 0 && t.quarter_turns <= 3; break;
    case TransformKind::HorizontalFlip: ok = true; break;
    case TransformKind::Brightness: ok = in(t.amount, ranges.brightness_min, ranges.brightness_max); break;
    case TransformKind::Contrast: ok = in(t.amount, ranges.contrast_min, ranges.contrast_max); break;
    case TransformKind::GaussianBlur:
      ok = in(t.amount, ranges.blur_sigma_min, ranges.blur_sigma_max) && t.amount > 0.0;
      break;
  }
  if (!ok) {
    fail(ErrorCode::InvalidArgument, std::string(to_string(t.kind)) + " parameter out of range: k=" +
                                         std::to_string(t.quarter_turns) + " amount=" + std::to_string(t.amount));
  }
}

TransformRecord sample_transform(std::uint64_t seed, const TransformRanges& ranges) {
  Rng rng(seed);
  const auto kind = static_cast<TransformKind>(rng.below(kTransformKindCount));
  switch (kind) {
    case TransformKind::Rotate90: return TransformRecord::rotate90(static_cast<int>(rng.below(4)), seed);
    case TransformKind::HorizontalFlip: return TransformRecord::horizontal_flip(seed);
    case TransformKind::Brightness:
      return TransformRecord::brightness(rng.uniform(ranges.brightness_min, ranges.brightness_max), seed);
    case TransformKind::Contrast:
      return TransformRecord::contrast(rng.uniform(ranges.contrast_min, ranges.contrast_max), seed);
    case TransformKind::GaussianBlur:
      return TransformRecord::gaussian_blur(rng.uniform(ranges.blur_sigma_min, ranges.blur_sigma_max), seed);
  }
  return TransformRecord::rotate90(0, seed);
}

Shape transformed_shape(const TransformRecord& t, Shape source) {
  if (t.kind == TransformKind::Rotate90 && t.quarter_turns % 2 == 1) return {source.width, source.height};
  return source;
}

namespace {

// Counter-clockwise quarter turns. Output pixel (r, c) of a once-rotated
// H x W raster (now W x H) reads source pixel (c, W - 1 - r).
template <typename T>
Raster<T> rotate_ccw(const Raster<T>& src, int quarter_turns) {
  const int k = ((quarter_turns % 4) + 4) % 4;
  if (k == 0) return src;
  const std::size_t h = src.shape.height, w = src.shape.width, ch = src.channels;
  Raster<T> out;
  out.channels = ch;
  out.shape = (k % 2 == 1) ? Shape{w, h} : Shape{h, w};
  out.data.resize(src.data.size());
  const std::size_t ow = out.shape.width;
  for (std::size_t r = 0; r < out.shape.height; ++r) {
    for (std::size_t c = 0; c < ow; ++c) {
      std::size_t sr = 0, sc = 0;
      switch (k) {
        case 1: sr = c; sc = w - 1 - r; break;
        case 2: sr = h - 1 - r; sc = w - 1 - c; break;
        case 3: sr = h - 1 - c; sc = r; break;
      }
      const T* from = src.data.data() + (sr * w + sc) * ch;
      std::copy(from, from + ch, out.data.begin() + static_cast<std::ptrdiff_t>((r * ow + c) * ch));
    }
  }
  return out;
}

template <typename T>
Raster<T> flip_columns(const Raster<T>& src) {
  const std::size_t h = src.shape.height, w = src.shape.width, ch = src.channels;
  Raster<T> out{src.shape, ch, std::vector<T>(src.data.size())};
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      const T* from = src.data.data() + (r * w + (w - 1 - c)) * ch;
      std::copy(from, from + ch, out.data.begin() + static_cast<std::ptrdiff_t>((r * w + c) * ch));
    }
  }
  return out;
}

template <typename T>
Raster<T> geometry_forward(const TransformRecord& t, const Raster<T>& r) {
  switch (t.kind) {
    case TransformKind::Rotate90: return rotate_ccw(r, t.quarter_turns);
    case TransformKind::HorizontalFlip: return flip_columns(r);
    default: return r;
  }
}

template <typename T>
Raster<T> geometry_inverse(const TransformRecord& t, const Raster<T>& r) {
  switch (t.kind) {
    case TransformKind::Rotate90: return rotate_ccw(r, 4 - t.quarter_turns);
    case TransformKind::HorizontalFlip: return flip_columns(r);
    default: return r;
  }
}

// Mirror indexing without edge repetition: ... 2 1 | 0 1 2 ... n-1 | n-2 ...
std::size_t reflect_index(std::ptrdiff_t i, std::size_t n) {
  if (n == 1) return 0;
  const auto period = static_cast<std::ptrdiff_t>(2 * (n - 1));
  std::ptrdiff_t m = i % period;
  if (m < 0) m += period;
  if (m >= static_cast<std::ptrdiff_t>(n)) m = period - m;
  return static_cast<std::size_t>(m);
}

std::vector<double> blur(std::span<const double> src, Shape shape, double sigma) {
  const auto kernel = gaussian_kernel(sigma);
  const auto radius = static_cast<std::ptrdiff_t>(kernel.size() / 2);
  const std::size_t h = shape.height, w = shape.width;
  std::vector<double> tmp(src.size()), out(src.size());
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      double acc = 0.0;
      for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
        acc += kernel[static_cast<std::size_t>(k + radius)] *
               src[r * w + reflect_index(static_cast<std::ptrdiff_t>(c) + k, w)];
      }
      tmp[r * w + c] = acc;
    }
  }
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      double acc = 0.0;
      for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
        acc += kernel[static_cast<std::size_t>(k + radius)] *
               tmp[reflect_index(static_cast<std::ptrdiff_t>(r) + k, h) * w + c];
      }
      out[r * w + c] = acc;
    }
  }
  return out;
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0)) fail(ErrorCode::InvalidArgument, "blur sigma must be positive");
  const auto radius = static_cast<std::ptrdiff_t>(std::ceil(3.0 * sigma));
  std::vector<double> taps(static_cast<std::size_t>(2 * radius + 1));
  for (std::ptrdiff_t i = -radius; i <= radius; ++i) {
    const double x = static_cast<double>(i);
    taps[static_cast<std::size_t>(i + radius)] = std::exp(-x * x / (2.0 * sigma * sigma));
  }
  const double sum = std::accumulate(taps.begin(), taps.end(), 0.0);
  for (auto& v : taps) v /= sum;
  return taps;
}

GrayImage apply(const TransformRecord& t, const GrayImage& img) {
  const auto shape = img.shape();
  std::vector<double> out;
  switch (t.kind) {
    case TransformKind::Rotate90:
    case TransformKind::HorizontalFlip: {
      auto r = geometry_forward(t, lift(img));
      return GrayImage(r.shape.height, r.shape.width, std::move(r.data));
    }
    case TransformKind::Brightness:
      out.reserve(shape.pixels());
      for (double v : img.data()) out.push_back(clamp01(v + t.amount));
      break;
    case TransformKind::Contrast: {
      const auto data = img.data();
      const double mean =
          data.empty() ? 0.0 : std::accumulate(data.begin(), data.end(), 0.0) / static_cast<double>(data.size());
      out.reserve(shape.pixels());
      for (double v : data) out.push_back(clamp01(mean + t.amount * (v - mean)));
      break;
    }
    case TransformKind::GaussianBlur:
      out = blur(img.data(), shape, t.amount);
      for (auto& v : out) v = clamp01(v);
      break;
  }
  return GrayImage(shape.height, shape.width, std::move(out));
}

BinaryMask apply(const TransformRecord& t, const BinaryMask& mask) {
  if (t.invertibility() == Invertibility::Photometric) return mask;
  Raster<std::uint8_t> r{mask.shape(), 1, {mask.data().begin(), mask.data().end()}};
  auto out = geometry_forward(t, r);
  return BinaryMask(out.shape.height, out.shape.width, std::move(out.data));
}

Raster<double> apply_geometry(const TransformRecord& t, const Raster<double>& r) { return geometry_forward(t, r); }

Raster<double> invert(const TransformRecord& t, const Raster<double>& r) { return geometry_inverse(t, r); }

ProbMap invert(const TransformRecord& t, const ProbMap& map) {
  if (t.invertibility() == Invertibility::Photometric) return map;
  auto r = geometry_inverse(t, lift(map));
  return ProbMap(r.shape.height, r.shape.width, r.channels, std::move(r.data), map.tolerance());
}

ProbMap invert(const TransformRecord& t, const ProbMap& map, Shape source) {
  require_same_shape(transformed_shape(t, source), map.shape(), "invert: map vs transformed source");
  return invert(t, map);
}

}  // namespace segunc
