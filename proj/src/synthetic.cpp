#include "segunc/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "segunc/rng.hpp"
#include "segunc/transforms.hpp"

namespace segunc {

namespace {

bool inside_ellipse(const Drusen& d, double r, double c) {
  const double dr = (r - d.center_row) / d.radius_row;
  const double dc = (c - d.center_col) / d.radius_col;
  return dr * dr + dc * dc <= 1.0;
}

double band_intensity(const std::vector<Layer>& layers, double row) {
  double value = layers.front().intensity;
  for (const auto& l : layers) {
    if (row >= static_cast<double>(l.top)) value = l.intensity;
  }
  return value;
}

// Felzenszwalb-Huttenlocher lower envelope of parabolas, in place on one line.
void edt_1d(std::vector<double>& f, std::size_t n, std::size_t offset, std::size_t step, std::vector<double>& d,
            std::vector<std::size_t>& v, std::vector<double>& z) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  auto at = [&](std::size_t q) -> double& { return f[offset + q * step]; };
  std::size_t k = 0;
  std::size_t first = n;
  for (std::size_t q = 0; q < n; ++q) {
    if (at(q) < inf) {
      first = q;
      break;
    }
  }
  if (first == n) return;
  v[0] = first;
  z[0] = -inf;
  z[1] = inf;
  for (std::size_t q = first + 1; q < n; ++q) {
    if (at(q) == inf) continue;
    const double fq = at(q) + static_cast<double>(q * q);
    double s = 0.0;
    while (true) {
      const double p = static_cast<double>(v[k]);
      s = (fq - (at(v[k]) + p * p)) / (2.0 * static_cast<double>(q) - 2.0 * p);
      if (s <= z[k] && k > 0) {
        --k;
        continue;
      }
      break;
    }
    if (s <= z[k]) {
      // k == 0 and the new parabola dominates everywhere.
      v[0] = q;
      z[0] = -inf;
      z[1] = inf;
      continue;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = inf;
  }
  k = 0;
  for (std::size_t q = 0; q < n; ++q) {
    while (z[k + 1] < static_cast<double>(q)) ++k;
    const double dq = static_cast<double>(q) - static_cast<double>(v[k]);
    d[q] = dq * dq + at(v[k]);
  }
  for (std::size_t q = 0; q < n; ++q) at(q) = d[q];
}

// Squared Euclidean distance from every pixel to the nearest pixel where
// `target` holds; infinity when there is none.
std::vector<double> squared_distance_to(const BinaryMask& mask, std::uint8_t target) {
  const std::size_t h = mask.height(), w = mask.width();
  std::vector<double> f(h * w);
  const auto m = mask.data();
  for (std::size_t i = 0; i < f.size(); ++i) {
    f[i] = m[i] == target ? 0.0 : std::numeric_limits<double>::infinity();
  }
  const std::size_t n = std::max(h, w);
  std::vector<double> d(n), z(n + 1);
  std::vector<std::size_t> v(n);
  for (std::size_t c = 0; c < w; ++c) edt_1d(f, h, c, w, d, v, z);
  for (std::size_t r = 0; r < h; ++r) edt_1d(f, w, r * w, 1, d, v, z);
  return f;
}

std::size_t reflect(std::ptrdiff_t i, std::size_t n) {
  if (n == 1) return 0;
  if (i < 0) return static_cast<std::size_t>(-i);
  if (i >= static_cast<std::ptrdiff_t>(n)) return 2 * n - 2 - static_cast<std::size_t>(i);
  return static_cast<std::size_t>(i);
}

// Counter stream for the perturbation filter taps; pass noise uses streams 1..T.
constexpr std::uint64_t kFilterStream = 0xF117E5;

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

void validate(const SceneSpec& spec) {
  if (spec.height == 0 || spec.width == 0) fail(ErrorCode::InvalidArgument, "scene needs a positive shape");
  if (spec.layers.empty() || spec.layers.front().top != 0) {
    fail(ErrorCode::InvalidArgument, "layers must start at row 0");
  }
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const auto& l = spec.layers[i];
    if (i > 0 && l.top <= spec.layers[i - 1].top) fail(ErrorCode::InvalidArgument, "layer tops must ascend");
    if (!(l.intensity >= 0.0 && l.intensity <= 1.0)) fail(ErrorCode::InvalidArgument, "layer intensity outside [0,1]");
  }
  if (!(spec.speckle_sigma >= 0.0)) fail(ErrorCode::InvalidArgument, "speckle sigma must be >= 0");
  const double h = static_cast<double>(spec.height), w = static_cast<double>(spec.width);
  for (std::size_t i = 0; i < spec.drusen.size(); ++i) {
    const auto& d = spec.drusen[i];
    if (!(d.radius_row > 0.0 && d.radius_col > 0.0)) fail(ErrorCode::InvalidArgument, "drusen radii must be positive");
    if (!(d.amplitude >= 0.0 && d.amplitude <= 1.0)) fail(ErrorCode::InvalidArgument, "drusen amplitude outside [0,1]");
    if (d.center_row - d.radius_row < 0.0 || d.center_row + d.radius_row > h - 1.0 ||
        d.center_col - d.radius_col < 0.0 || d.center_col + d.radius_col > w - 1.0) {
      fail(ErrorCode::DrusenOutOfBounds, "drusen " + std::to_string(i) + " leaves the image");
    }
  }
}

Scene generate_scene(const SceneSpec& spec) {
  validate(spec);
  const std::size_t h = spec.height, w = spec.width;
  std::vector<double> img(h * w);
  std::vector<std::uint8_t> mask(h * w, 0);
  for (std::size_t c = 0; c < w; ++c) {
    const double x = static_cast<double>(c);
    for (std::size_t r = 0; r < h; ++r) {
      const double y = static_cast<double>(r);
      double lift = 0.0;
      for (const auto& d : spec.drusen) {
        const double u = (x - d.center_col) / d.radius_col;
        if (y < d.center_row && std::abs(u) < 1.0) lift = std::max(lift, d.radius_row * std::sqrt(1.0 - u * u));
      }
      double value = band_intensity(spec.layers, y + lift);
      for (const auto& d : spec.drusen) {
        if (inside_ellipse(d, y, x)) {
          value = d.amplitude;
          mask[r * w + c] = 1;
        }
      }
      const std::size_t p = r * w + c;
      if (spec.speckle_sigma > 0.0) value *= 1.0 + spec.speckle_sigma * counter_normal(spec.seed, 0, p);
      img[p] = std::clamp(value, 0.0, 1.0);
    }
  }
  return {GrayImage(h, w, std::move(img)), BinaryMask(h, w, std::move(mask))};
}

std::vector<Layer> default_layers(std::size_t height) {
  auto row = [&](double f) { return static_cast<std::size_t>(std::lround(f * static_cast<double>(height))); };
  return {{0, 0.08}, {row(0.30), 0.55}, {row(0.45), 0.35}, {row(0.62), 0.90}, {row(0.70), 0.30}};
}

SceneSpec random_scene_spec(std::uint64_t seed, const SceneOptions& o) {
  Rng rng(seed);
  SceneSpec spec;
  spec.height = o.height;
  spec.width = o.width;
  spec.layers = default_layers(o.height);
  spec.speckle_sigma = o.speckle_sigma;
  spec.seed = seed;

  const double host_row = static_cast<double>(spec.layers[3].top);
  const std::size_t wanted = o.min_drusen + static_cast<std::size_t>(rng.below(o.max_drusen - o.min_drusen + 1));
  const double w = static_cast<double>(o.width), h = static_cast<double>(o.height);
  for (std::size_t attempt = 0; attempt < 64 && spec.drusen.size() < wanted; ++attempt) {
    Drusen d;
    d.radius_col = rng.uniform(o.min_radius_col, o.max_radius_col);
    d.radius_row = d.radius_col * rng.uniform(o.min_aspect, o.max_aspect);
    d.center_row = std::clamp(host_row, d.radius_row + 1.0, h - 2.0 - d.radius_row);
    const double lo = d.radius_col + 1.0, hi = w - 2.0 - d.radius_col;
    if (hi < lo) continue;
    d.center_col = rng.uniform(lo, hi);
    d.amplitude = rng.uniform(0.6, 0.8);
    const bool overlaps = std::any_of(spec.drusen.begin(), spec.drusen.end(), [&](const Drusen& e) {
      return std::abs(e.center_col - d.center_col) < e.radius_col + d.radius_col + 2.0;
    });
    if (!overlaps) spec.drusen.push_back(d);
  }
  return spec;
}

void validate(const MockPredictorSpec& spec) {
  if (!(spec.sigma_model >= 0.0) || !std::isfinite(spec.sigma_model)) {
    fail(ErrorCode::InvalidArgument, "sigma_model must be >= 0");
  }
  if (!(spec.gain >= 0.0) || !std::isfinite(spec.gain)) fail(ErrorCode::InvalidArgument, "gain must be >= 0");
  if (!(spec.softness > 0.0) || !std::isfinite(spec.softness)) {
    fail(ErrorCode::InvalidArgument, "softness must be > 0");
  }
}

std::vector<double> signed_boundary_distance(const BinaryMask& mask) {
  const auto to_fg = squared_distance_to(mask, 1);
  const auto to_bg = squared_distance_to(mask, 0);
  // With no boundary at all, every pixel sits "far" away.
  const double far = static_cast<double>(mask.height() + mask.width());
  const auto m = mask.data();
  std::vector<double> sd(m.size());
  for (std::size_t p = 0; p < m.size(); ++p) {
    if (m[p]) sd[p] = std::isinf(to_bg[p]) ? far : std::sqrt(to_bg[p]) - 0.5;
    else sd[p] = std::isinf(to_fg[p]) ? -far : -(std::sqrt(to_fg[p]) - 0.5);
  }
  return sd;
}

std::array<double, 9> perturbation_filter(std::uint64_t seed) {
  std::array<double, 9> w;
  double mean = 0.0;
  for (std::size_t k = 0; k < 9; ++k) {
    w[k] = counter_normal(seed, kFilterStream, k);
    mean += w[k] / 9.0;
  }
  double norm = 0.0;
  for (auto& v : w) {
    v -= mean;
    norm += v * v;
  }
  norm = std::sqrt(norm);
  for (auto& v : w) v /= norm;
  return w;
}

std::vector<double> local_perturbation(const GrayImage& img, std::uint64_t seed) {
  const auto w = perturbation_filter(seed);
  const std::size_t h = img.height(), wd = img.width();
  std::vector<double> out(h * wd);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < wd; ++c) {
      double sum = 0.0;
      std::size_t k = 0;
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          sum += w[k++] * img.at(reflect(static_cast<std::ptrdiff_t>(r) + dr, h),
                                 reflect(static_cast<std::ptrdiff_t>(c) + dc, wd));
        }
      }
      out[r * wd + c] = sum / MockPredictorSpec::kPerturbationUnit;
    }
  }
  return out;
}

ProbMap mock_predict(const MockPredictorSpec& spec, const GrayImage& img, const BinaryMask& gt,
                     std::size_t pass_index) {
  validate(spec);
  require_same_shape(img.shape(), gt.shape(), "mock_predict: image vs truth");
  const auto sd = signed_boundary_distance(gt);
  std::vector<double> dev;
  if (spec.gain > 0.0) dev = local_perturbation(img, spec.seed);
  std::vector<double> probs(sd.size() * 2);
  for (std::size_t p = 0; p < sd.size(); ++p) {
    double logit = sd[p] / spec.softness;
    if (spec.sigma_model > 0.0) logit += spec.sigma_model * counter_normal(spec.seed, pass_index + 1, p);
    if (spec.gain > 0.0) logit += spec.gain * dev[p];
    const double fg = sigmoid(logit);
    probs[2 * p] = 1.0 - fg;
    probs[2 * p + 1] = fg;
  }
  return ProbMap(img.height(), img.width(), 2, std::move(probs));
}

ProbVolume run_mc(const MockPredictorSpec& spec, const GrayImage& img, const BinaryMask& gt, std::size_t passes) {
  if (passes == 0) fail(ErrorCode::EmptyVolume, "run_mc needs at least one pass");
  std::vector<ProbMap> maps;
  maps.reserve(passes);
  for (std::size_t t = 0; t < passes; ++t) maps.push_back(mock_predict(spec, img, gt, t));
  return ProbVolume(std::move(maps), Provenance::McDropout);
}

ProbVolume run_tta(const MockPredictorSpec& spec, const GrayImage& img, const BinaryMask& gt,
                   std::span<const TransformRecord> transforms) {
  if (transforms.empty()) fail(ErrorCode::EmptyVolume, "run_tta needs at least one transform");
  std::vector<ProbMap> maps;
  maps.reserve(transforms.size());
  for (const auto& t : transforms) {
    const auto map = mock_predict(spec, apply(t, img), apply(t, gt), 0);
    maps.push_back(invert(t, map, img.shape()));
  }
  return ProbVolume(std::move(maps), Provenance::Tta, {transforms.begin(), transforms.end()});
}

ProbVolume run_tta(const MockPredictorSpec& spec, const GrayImage& img, const BinaryMask& gt, std::size_t passes,
                   std::span<const std::uint64_t> transform_seeds, const TransformRanges& ranges) {
  if (transform_seeds.size() != passes) {
    fail(ErrorCode::CountMismatch, std::to_string(transform_seeds.size()) + " transform seeds for " +
                                       std::to_string(passes) + " passes");
  }
  std::vector<TransformRecord> transforms;
  transforms.reserve(passes);
  for (auto s : transform_seeds) transforms.push_back(sample_transform(s, ranges));
  return run_tta(spec, img, gt, transforms);
}

std::vector<std::uint64_t> derive_seeds(std::uint64_t base, std::size_t count) {
  std::vector<std::uint64_t> seeds(count);
  for (std::size_t i = 0; i < count; ++i) seeds[i] = counter_hash(base, 0x7474, i);
  return seeds;
}

}  // namespace segunc
