#include "segunc/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "segunc/uncertainty.hpp"

namespace segunc {

namespace {

ConfusionCounts count(const BinaryMask& pred, const BinaryMask& gt, const BinaryMask* include) {
  require_same_shape(pred.shape(), gt.shape(), "confusion: pred vs gt");
  if (include) require_same_shape(pred.shape(), include->shape(), "confusion: include mask");
  const auto p = pred.data();
  const auto g = gt.data();
  ConfusionCounts c;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (include && include->data()[i] == 0) continue;
    if (p[i] && g[i]) ++c.tp;
    else if (p[i]) ++c.fp;
    else if (g[i]) ++c.fn;
    else ++c.tn;
  }
  return c;
}

std::optional<double> ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

ConfusionCounts confusion(const BinaryMask& pred, const BinaryMask& gt) { return count(pred, gt, nullptr); }

ConfusionCounts confusion(const BinaryMask& pred, const BinaryMask& gt, const BinaryMask& include) {
  return count(pred, gt, &include);
}

Metrics metrics(const ConfusionCounts& c) {
  if (c.tp + c.fp + c.fn == 0) return {1.0, 1.0, 1.0, true};
  Metrics m;
  m.dice = 2.0 * static_cast<double>(c.tp) / static_cast<double>(2 * c.tp + c.fp + c.fn);
  m.precision = ratio(c.tp, c.tp + c.fp);
  m.recall = ratio(c.tp, c.tp + c.fn);
  return m;
}

BinaryMask binarize(const ProbMap& mean) {
  std::vector<std::uint8_t> out(mean.shape().pixels());
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = mean.at(p, kForegroundClass) >= 0.5 ? 1 : 0;
  return BinaryMask(mean.height(), mean.width(), std::move(out));
}

ThresholdPolicy ThresholdPolicy::quantile(double q) {
  if (!(q > 0.0 && q < 1.0)) fail(ErrorCode::InvalidArgument, "quantile must lie in (0,1): " + std::to_string(q));
  return {Mode::EntropyQuantile, q};
}

ThresholdPolicy ThresholdPolicy::absolute(double tau) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) {
    fail(ErrorCode::InvalidArgument, "entropy threshold must be >= 0: " + std::to_string(tau));
  }
  return {Mode::AbsoluteEntropy, tau};
}

ThresholdPolicy ThresholdPolicy::exclude_fraction(double fraction) { return quantile(1.0 - fraction); }

double entropy_cutoff(const ThresholdPolicy& policy, std::span<const double> entropies) {
  if (policy.mode == ThresholdPolicy::Mode::AbsoluteEntropy) return ThresholdPolicy::absolute(policy.value).value;
  const double q = ThresholdPolicy::quantile(policy.value).value;
  if (entropies.empty()) return 0.0;
  std::vector<double> sorted(entropies.begin(), entropies.end());
  const auto n = sorted.size();
  auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
  rank = std::clamp<std::size_t>(rank, 1, n);
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(rank - 1), sorted.end());
  return sorted[rank - 1];
}

BinaryMask inclusion_mask(const EntropyMap& ent, double cutoff) {
  std::vector<std::uint8_t> keep(ent.shape().pixels());
  const auto h = ent.data();
  for (std::size_t p = 0; p < keep.size(); ++p) keep[p] = h[p] > cutoff ? 0 : 1;
  return BinaryMask(ent.height(), ent.width(), std::move(keep));
}

EvalReport thresholded_eval_at(const ProbMap& mean, const EntropyMap& ent, const BinaryMask& gt, double cutoff) {
  require_same_shape(mean.shape(), ent.shape(), "thresholded_eval: mean vs entropy");
  require_same_shape(mean.shape(), gt.shape(), "thresholded_eval: mean vs gt");
  const auto pred = binarize(mean);
  const auto keep = inclusion_mask(ent, cutoff);
  const auto u = average_drusen_uncertainty(mean, ent);

  EvalReport r;
  r.plain = metrics(confusion(pred, gt));
  r.thresholded = metrics(confusion(pred, gt, keep));
  r.u_avg = u.u_avg;
  r.u_avg_pixels = u.pixels;
  r.u_avg_empty = u.empty_selection;
  r.cutoff = cutoff;
  const std::size_t n = keep.shape().pixels();
  r.excluded_fraction = n == 0 ? 0.0 : static_cast<double>(n - keep.count()) / static_cast<double>(n);
  return r;
}

EvalReport thresholded_eval(const ProbMap& mean, const EntropyMap& ent, const BinaryMask& gt,
                            const ThresholdPolicy& policy) {
  return thresholded_eval_at(mean, ent, gt, entropy_cutoff(policy, ent.data()));
}

SizeClass size_class_of_count(std::size_t drusen_pixels, const SizeThresholds& t) {
  if (drusen_pixels < t.small_below) return SizeClass::Small;
  if (drusen_pixels < t.large_from) return SizeClass::Medium;
  return SizeClass::Large;
}

std::optional<SizeClass> size_class(const BinaryMask& gt, const SizeThresholds& thresholds) {
  const std::size_t n = gt.count();
  if (n == 0) return std::nullopt;
  return size_class_of_count(n, thresholds);
}

SizeThresholds tertile_thresholds(std::span<const std::size_t> counts) {
  if (counts.size() < 3) fail(ErrorCode::InvalidArgument, "tertiles need at least 3 counts");
  std::vector<std::size_t> sorted(counts.begin(), counts.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const std::size_t t1 = std::max<std::size_t>(sorted[(n + 1) / 3], 1);
  const std::size_t t2 = std::max(sorted[(2 * n + 1) / 3], t1 + 1);
  return {t1, t2};
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    fail(ErrorCode::InvalidArgument, "pearson: series lengths differ (" + std::to_string(xs.size()) + " vs " +
                                         std::to_string(ys.size()) + ")");
  }
  if (xs.size() < 2) fail(ErrorCode::InvalidArgument, "pearson needs at least 2 points");
  auto constant = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
  };
  if (constant(xs) || constant(ys)) fail(ErrorCode::DegenerateSeries, "pearson: constant series");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) fail(ErrorCode::DegenerateSeries, "pearson: constant series");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace segunc
