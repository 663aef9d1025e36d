#pragma once

#include <cstddef>
#include <span>

#include "segunc/types.hpp"

namespace segunc {

enum class AggregationMode { McDropout, Tta };

struct AggregationConfig {
  std::size_t pass_count = 10;
  AggregationMode mode = AggregationMode::McDropout;
};

/// Pixel- and class-wise arithmetic mean over the passes. Serves both MC
/// dropout and TTA volumes; TTA maps arrive already back-transformed.
ProbMap aggregate_passes(const ProbVolume& vol);
ProbMap aggregate_passes(std::span<const ProbMap> maps);

/// Predictive entropy -sum_c p_c log p_c per pixel, with 0 log 0 = 0.
EntropyMap entropy_map(const ProbMap& mean, LogBase base = LogBase::Bits);

/// Entropy of a single distribution in the given base.
double entropy(std::span<const double> probs, LogBase base = LogBase::Bits);

struct DrusenUncertainty {
  double u_avg = 0.0;
  std::size_t pixels = 0;
  /// No pixel reached the foreground gate; u_avg is reported as 0.
  bool empty_selection = false;
};

/// Mean entropy over the pixels whose drusen probability is >= 0.5.
DrusenUncertainty average_drusen_uncertainty(const ProbMap& mean, const EntropyMap& ent);

}  // namespace segunc
