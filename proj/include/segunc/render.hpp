#pragma once

#include <array>
#include <cstdint>
#include <filesystem>

#include "segunc/image_io.hpp"
#include "segunc/types.hpp"

namespace segunc {

/// Embedded colormap: viridis, 256 entries. Bump when the table changes.
constexpr int kColormapVersion = 1;

using Rgb = std::array<std::uint8_t, 3>;

constexpr Rgb kTruthColor{0, 255, 0};
constexpr Rgb kPredictionColor{255, 0, 255};

Rgb colormap(std::size_t index);

/// Grayscale underlay; truth pixels blended 50% with kTruthColor, then
/// predicted pixels blended 50% with kPredictionColor. Empty masks leave the
/// gray image untouched.
RgbImage render_overlay(const GrayImage& img, const BinaryMask& gt, const BinaryMask& pred);

/// Entropy scaled by the map's maximum (log C) onto the 256-entry table.
RgbImage render_heatmap(const EntropyMap& ent);

void render_overlay(const GrayImage& img, const BinaryMask& gt, const BinaryMask& pred,
                    const std::filesystem::path& out);
void render_heatmap(const EntropyMap& ent, const std::filesystem::path& out);

}  // namespace segunc
