#pragma once

#include <cstdint>
#include <random>

namespace segunc {

/// Portable draws on top of std::mt19937_64. The standard distributions are
/// implementation-defined, so values are mapped by hand to stay bit-stable
/// across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double unit();
  double uniform(double lo, double hi);
  /// Uniform integer in [0, n). Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t n);
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// Counter-based draws: a pure function of (seed, stream, index), so results
/// do not depend on evaluation order.
std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);
double counter_unit(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);
double counter_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

}  // namespace segunc
