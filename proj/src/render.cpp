#include "segunc/render.hpp"

#include <algorithm>
#include <cmath>

namespace segunc {

namespace {

constexpr std::array<Rgb, 256> kViridis{{
#include "colormap_viridis.inc"
}};

std::uint8_t blend(std::uint8_t base, std::uint8_t tint) {
  return static_cast<std::uint8_t>((static_cast<unsigned>(base) + tint + 1) / 2);
}

}  // namespace

Rgb colormap(std::size_t index) { return kViridis.at(std::min<std::size_t>(index, 255)); }

RgbImage render_overlay(const GrayImage& img, const BinaryMask& gt, const BinaryMask& pred) {
  require_same_shape(img.shape(), gt.shape(), "render_overlay: image vs truth");
  require_same_shape(img.shape(), pred.shape(), "render_overlay: image vs prediction");
  RgbImage out{img.height(), img.width(), std::vector<std::uint8_t>(img.shape().pixels() * 3)};
  const auto g = gt.data();
  const auto p = pred.data();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto v = static_cast<std::uint8_t>(std::lround(img.data()[i] * 255.0));
    Rgb px{v, v, v};
    if (g[i]) {
      for (int c = 0; c < 3; ++c) px[c] = blend(px[c], kTruthColor[c]);
    }
    if (p[i]) {
      for (int c = 0; c < 3; ++c) px[c] = blend(px[c], kPredictionColor[c]);
    }
    std::copy(px.begin(), px.end(), out.data.begin() + static_cast<std::ptrdiff_t>(3 * i));
  }
  return out;
}

RgbImage render_heatmap(const EntropyMap& ent) {
  RgbImage out{ent.height(), ent.width(), std::vector<std::uint8_t>(ent.shape().pixels() * 3)};
  const double top = ent.max_value();
  const auto h = ent.data();
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double t = std::clamp(h[i] / top, 0.0, 1.0);
    const auto px = colormap(static_cast<std::size_t>(std::lround(t * 255.0)));
    std::copy(px.begin(), px.end(), out.data.begin() + static_cast<std::ptrdiff_t>(3 * i));
  }
  return out;
}

void render_overlay(const GrayImage& img, const BinaryMask& gt, const BinaryMask& pred,
                    const std::filesystem::path& out) {
  write_png_rgb(out, render_overlay(img, gt, pred));
}

void render_heatmap(const EntropyMap& ent, const std::filesystem::path& out) { write_png_rgb(out, render_heatmap(ent)); }

}  // namespace segunc
