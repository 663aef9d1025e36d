#include "segunc/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace segunc {

ProbMap aggregate_passes(const ProbVolume& vol) { return aggregate_passes(vol.maps()); }

ProbMap aggregate_passes(std::span<const ProbMap> maps) {
  if (maps.empty()) fail(ErrorCode::EmptyVolume, "cannot aggregate zero passes");
  const auto& first = maps.front();
  std::vector<double> sum(first.data().size(), 0.0);
  double tolerance = ProbMap::kSumTolerance;
  for (const auto& m : maps) {
    tolerance = std::max(tolerance, m.tolerance());
    require_same_shape(first.shape(), m.shape(), "aggregate_passes");
    if (m.classes() != first.classes()) fail(ErrorCode::ShapeMismatch, "aggregate_passes: class counts differ");
    const auto d = m.data();
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += d[i];
  }
  const double t = static_cast<double>(maps.size());
  for (auto& v : sum) v /= t;
  return ProbMap(first.height(), first.width(), first.classes(), std::move(sum), tolerance);
}

double entropy(std::span<const double> probs, LogBase base) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * (base == LogBase::Bits ? std::log2(p) : std::log(p));
  }
  return h;
}

EntropyMap entropy_map(const ProbMap& mean, LogBase base) {
  const std::size_t n = mean.shape().pixels();
  std::vector<double> out(n);
  for (std::size_t p = 0; p < n; ++p) out[p] = entropy(mean.pixel(p), base);
  return EntropyMap(mean.height(), mean.width(), mean.classes(), base, std::move(out));
}

DrusenUncertainty average_drusen_uncertainty(const ProbMap& mean, const EntropyMap& ent) {
  require_same_shape(mean.shape(), ent.shape(), "average_drusen_uncertainty");
  const auto h = ent.data();
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t p = 0; p < h.size(); ++p) {
    if (mean.at(p, kForegroundClass) >= 0.5) {
      sum += h[p];
      ++n;
    }
  }
  if (n == 0) return {0.0, 0, true};
  return {sum / static_cast<double>(n), n, false};
}

}  // namespace segunc
