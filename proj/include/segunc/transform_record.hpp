#pragma once

#include <cstdint>
#include <string_view>

namespace segunc {

enum class TransformKind { Rotate90, HorizontalFlip, Brightness, Contrast, GaussianBlur };

/// Geometric transforms carry a true inverse; photometric ones invert to identity.
enum class Invertibility { Geometric, Photometric };

constexpr int kTransformKindCount = 5;

/// Parameter ranges for the randomized transforms. All bounds inclusive.
struct TransformRanges {
  double brightness_min = -0.2;
  double brightness_max = 0.2;
  double contrast_min = 0.7;
  double contrast_max = 1.3;
  double blur_sigma_min = 0.5;
  double blur_sigma_max = 2.0;
};

/// One test-time transform. `quarter_turns` is used by Rotate90 only; `amount`
/// is the brightness delta, contrast factor or blur sigma depending on kind.
struct TransformRecord {
  TransformKind kind = TransformKind::Rotate90;
  int quarter_turns = 0;
  double amount = 0.0;
  std::uint64_t seed = 0;

  Invertibility invertibility() const noexcept {
    return kind == TransformKind::Rotate90 || kind == TransformKind::HorizontalFlip
               ? Invertibility::Geometric
               : Invertibility::Photometric;
  }

  bool operator==(const TransformRecord&) const = default;

  static TransformRecord rotate90(int k, std::uint64_t seed = 0) { return {TransformKind::Rotate90, k, 0.0, seed}; }
  static TransformRecord horizontal_flip(std::uint64_t seed = 0) { return {TransformKind::HorizontalFlip, 0, 0.0, seed}; }
  static TransformRecord brightness(double delta, std::uint64_t seed = 0) { return {TransformKind::Brightness, 0, delta, seed}; }
  static TransformRecord contrast(double factor, std::uint64_t seed = 0) { return {TransformKind::Contrast, 0, factor, seed}; }
  static TransformRecord gaussian_blur(double sigma, std::uint64_t seed = 0) { return {TransformKind::GaussianBlur, 0, sigma, seed}; }
};

std::string_view to_string(TransformKind kind);
std::string_view to_string(Invertibility inv);

/// Throws InvalidArgument when parameters fall outside `ranges`.
void validate(const TransformRecord& t, const TransformRanges& ranges = {});

}  // namespace segunc
