#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "segunc/types.hpp"

namespace segunc {

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const noexcept { return tp + fp + fn + tn; }
  bool operator==(const ConfusionCounts&) const = default;
};

ConfusionCounts confusion(const BinaryMask& pred, const BinaryMask& gt);
/// Counts only the pixels where `include` is 1.
ConfusionCounts confusion(const BinaryMask& pred, const BinaryMask& gt, const BinaryMask& include);

/// Dice 2tp/(2tp+fp+fn), precision tp/(tp+fp), recall tp/(tp+fn).
/// Empty truth and empty prediction give 1 for all three, flagged degenerate;
/// any other 0/0 ratio is left undefined.
Metrics metrics(const ConfusionCounts& c);

/// 1 where the drusen probability is >= 0.5.
BinaryMask binarize(const ProbMap& mean);

struct ThresholdPolicy {
  enum class Mode { EntropyQuantile, AbsoluteEntropy };

  Mode mode = Mode::EntropyQuantile;
  double value = 0.975;  // quantile q in (0,1), or entropy tau >= 0

  static ThresholdPolicy quantile(double q);
  static ThresholdPolicy absolute(double tau);
  /// Quantile policy that keeps the least uncertain (1 - fraction) of pixels.
  static ThresholdPolicy exclude_fraction(double fraction);
};

/// Entropy cutoff for `policy`. For quantiles this is the order statistic at
/// rank ceil(q n) of the sorted values, so pixels strictly above it number at
/// most n - ceil(q n).
double entropy_cutoff(const ThresholdPolicy& policy, std::span<const double> entropies);

/// 1 for pixels kept in the evaluation (entropy <= cutoff).
BinaryMask inclusion_mask(const EntropyMap& ent, double cutoff);

/// Plain and thresholded metrics, U_avg and excluded fraction for one image.
/// The quantile cutoff is computed over this image's entropies.
EvalReport thresholded_eval(const ProbMap& mean, const EntropyMap& ent, const BinaryMask& gt,
                            const ThresholdPolicy& policy = {});

/// Same with a cutoff computed elsewhere (e.g. over a whole dataset).
EvalReport thresholded_eval_at(const ProbMap& mean, const EntropyMap& ent, const BinaryMask& gt, double cutoff);

SizeClass size_class_of_count(std::size_t drusen_pixels, const SizeThresholds& thresholds);

/// nullopt when the ground truth holds no drusen (EmptyGroundTruth).
std::optional<SizeClass> size_class(const BinaryMask& gt, const SizeThresholds& thresholds);

/// Boundaries splitting the drusen counts into three groups whose sizes
/// differ by at most one (for distinct counts). Needs at least 3 counts.
SizeThresholds tertile_thresholds(std::span<const std::size_t> counts);

/// Sample Pearson correlation coefficient. Throws DegenerateSeries when either
/// series is constant, InvalidArgument on length mismatch or fewer than 2 points.
double pearson(std::span<const double> xs, std::span<const double> ys);

}  // namespace segunc
