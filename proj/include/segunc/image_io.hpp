#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "segunc/types.hpp"

namespace segunc {

/// Gray images are quantized to 8 or 16 bits on write and read back as v / max.
void write_pgm(const std::filesystem::path& path, const GrayImage& img, int bit_depth = 8);
GrayImage read_pgm(const std::filesystem::path& path);

void write_png_gray(const std::filesystem::path& path, const GrayImage& img, int bit_depth = 8);
GrayImage read_png_gray(const std::filesystem::path& path);

/// Dispatch on extension (.pgm / .png).
void write_image(const std::filesystem::path& path, const GrayImage& img, int bit_depth = 8);
GrayImage read_image(const std::filesystem::path& path);

/// Masks are stored as 8-bit gray with values 0 and 255 only.
void write_mask(const std::filesystem::path& path, const BinaryMask& mask);
/// Throws MalformedMask on any value other than 0 or 255.
BinaryMask read_mask(const std::filesystem::path& path);

/// 8-bit interleaved RGB, row-major.
struct RgbImage {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::uint8_t> data;

  bool operator==(const RgbImage&) const = default;
};

void write_png_rgb(const std::filesystem::path& path, const RgbImage& img);
RgbImage read_png_rgb(const std::filesystem::path& path);

}  // namespace segunc
