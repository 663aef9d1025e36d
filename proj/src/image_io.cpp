#include "segunc/image_io.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>

namespace segunc {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) fail(ErrorCode::IoFailure, std::string("cannot open ") + path.string());
  return f;
}

void check_depth(int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) {
    fail(ErrorCode::UnsupportedDtype, "bit depth must be 8 or 16, got " + std::to_string(bit_depth));
  }
}

std::uint32_t quantize(double v, std::uint32_t max) {
  return static_cast<std::uint32_t>(std::lround(v * static_cast<double>(max)));
}

// Raw 8/16-bit samples, `channels` per pixel.
struct Samples {
  std::size_t height = 0;
  std::size_t width = 0;
  int channels = 1;
  int bit_depth = 8;
  std::vector<std::uint16_t> values;
};

[[noreturn]] void png_error_fn(png_structp, png_const_charp msg) { throw Error(ErrorCode::MalformedHeader, msg); }
void png_warning_fn(png_structp, png_const_charp) {}

void write_png(const std::filesystem::path& path, const Samples& s) {
  auto file = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_fn, png_warning_fn);
  if (!png) fail(ErrorCode::IoFailure, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* p;
    png_infop* i;
    ~Guard() { png_destroy_write_struct(p, i); }
  } guard{&png, &info};

  png_init_io(png, file.get());
  const int color = s.channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY;
  png_set_IHDR(png, info, static_cast<png_uint_32>(s.width), static_cast<png_uint_32>(s.height), s.bit_depth, color,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, 6);
  png_write_info(png, info);
  const std::size_t bytes_per = s.bit_depth == 16 ? 2 : 1;
  std::vector<png_byte> row(s.width * static_cast<std::size_t>(s.channels) * bytes_per);
  const std::size_t per_row = s.width * static_cast<std::size_t>(s.channels);
  for (std::size_t r = 0; r < s.height; ++r) {
    for (std::size_t i = 0; i < per_row; ++i) {
      const std::uint16_t v = s.values[r * per_row + i];
      if (bytes_per == 2) {
        row[2 * i] = static_cast<png_byte>(v >> 8);
        row[2 * i + 1] = static_cast<png_byte>(v & 0xFF);
      } else {
        row[i] = static_cast<png_byte>(v);
      }
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  if (std::fflush(file.get()) != 0) fail(ErrorCode::IoFailure, "write failed for " + path.string());
}

Samples read_png(const std::filesystem::path& path) {
  auto file = open_file(path, "rb");
  png_byte sig[8];
  if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    fail(ErrorCode::MalformedHeader, path.string() + " is not a PNG file");
  }
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_fn, png_warning_fn);
  if (!png) fail(ErrorCode::IoFailure, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* p;
    png_infop* i;
    ~Guard() { png_destroy_read_struct(p, i, nullptr); }
  } guard{&png, &info};

  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);
  const int color = png_get_color_type(png, info);
  int depth = png_get_bit_depth(png, info);
  if (png_get_interlace_type(png, info) != PNG_INTERLACE_NONE) {
    fail(ErrorCode::UnsupportedDtype, path.string() + ": interlaced PNG");
  }
  Samples s;
  if (color == PNG_COLOR_TYPE_GRAY) {
    s.channels = 1;
    if (depth < 8) {
      png_set_expand_gray_1_2_4_to_8(png);
      depth = 8;
    }
  } else if (color == PNG_COLOR_TYPE_RGB) {
    s.channels = 3;
  } else {
    fail(ErrorCode::UnsupportedDtype, path.string() + ": only gray and RGB PNGs are supported");
  }
  png_read_update_info(png, info);
  s.height = png_get_image_height(png, info);
  s.width = png_get_image_width(png, info);
  s.bit_depth = depth;
  const std::size_t per_row = s.width * static_cast<std::size_t>(s.channels);
  std::vector<png_byte> row(png_get_rowbytes(png, info));
  s.values.resize(s.height * per_row);
  for (std::size_t r = 0; r < s.height; ++r) {
    png_read_row(png, row.data(), nullptr);
    for (std::size_t i = 0; i < per_row; ++i) {
      s.values[r * per_row + i] =
          depth == 16 ? static_cast<std::uint16_t>((row[2 * i] << 8) | row[2 * i + 1]) : row[i];
    }
  }
  png_read_end(png, nullptr);
  return s;
}

Samples gray_samples(const GrayImage& img, int bit_depth) {
  check_depth(bit_depth);
  const std::uint32_t max = bit_depth == 16 ? 65535 : 255;
  Samples s{img.height(), img.width(), 1, bit_depth, {}};
  s.values.reserve(img.data().size());
  for (double v : img.data()) s.values.push_back(static_cast<std::uint16_t>(quantize(v, max)));
  return s;
}

GrayImage from_samples(const Samples& s, const std::filesystem::path& path) {
  if (s.channels != 1) fail(ErrorCode::UnsupportedDtype, path.string() + ": expected a single-channel image");
  const double max = s.bit_depth == 16 ? 65535.0 : 255.0;
  std::vector<double> data;
  data.reserve(s.values.size());
  for (auto v : s.values) data.push_back(static_cast<double>(v) / max);
  return GrayImage(s.height, s.width, std::move(data));
}

Samples read_pgm_samples(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoFailure, "cannot open " + path.string());
  auto token = [&]() {
    std::string t;
    char ch = 0;
    while (in.get(ch)) {
      if (ch == '#') {
        std::string comment;
        std::getline(in, comment);
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(ch))) {
        if (!t.empty()) break;
        continue;
      }
      t.push_back(ch);
    }
    return t;
  };
  if (token() != "P5") fail(ErrorCode::MalformedHeader, path.string() + ": not a binary PGM (P5)");
  std::size_t w = 0, h = 0, maxval = 0;
  try {
    w = std::stoul(token());
    h = std::stoul(token());
    maxval = std::stoul(token());
  } catch (const std::exception&) {
    fail(ErrorCode::MalformedHeader, path.string() + ": bad PGM header");
  }
  if (maxval != 255 && maxval != 65535) {
    fail(ErrorCode::UnsupportedDtype, path.string() + ": PGM maxval must be 255 or 65535");
  }
  const int depth = maxval == 65535 ? 16 : 8;
  const std::size_t bytes = w * h * (depth == 16 ? 2 : 1);
  std::vector<unsigned char> raw(bytes);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(bytes));
  if (static_cast<std::size_t>(in.gcount()) != bytes) fail(ErrorCode::ShapeMismatch, path.string() + ": truncated PGM");
  Samples s{h, w, 1, depth, std::vector<std::uint16_t>(w * h)};
  for (std::size_t i = 0; i < w * h; ++i) {
    s.values[i] = depth == 16 ? static_cast<std::uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1]) : raw[i];
  }
  return s;
}

void write_pgm_samples(const std::filesystem::path& path, const Samples& s) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoFailure, "cannot create " + path.string());
  out << "P5\n" << s.width << " " << s.height << "\n" << (s.bit_depth == 16 ? 65535 : 255) << "\n";
  std::vector<char> raw;
  raw.reserve(s.values.size() * 2);
  for (auto v : s.values) {
    if (s.bit_depth == 16) raw.push_back(static_cast<char>(v >> 8));
    raw.push_back(static_cast<char>(v & 0xFF));
  }
  out.write(raw.data(), static_cast<std::streamsize>(raw.size()));
  if (!out) fail(ErrorCode::IoFailure, "write failed for " + path.string());
}

bool is_png(const std::filesystem::path& path) { return path.extension() == ".png"; }

Samples read_any(const std::filesystem::path& path) {
  if (is_png(path)) return read_png(path);
  if (path.extension() == ".pgm") return read_pgm_samples(path);
  fail(ErrorCode::UnsupportedDtype, path.string() + ": unknown image extension (use .png or .pgm)");
}

}  // namespace

void write_pgm(const std::filesystem::path& path, const GrayImage& img, int bit_depth) {
  write_pgm_samples(path, gray_samples(img, bit_depth));
}

GrayImage read_pgm(const std::filesystem::path& path) { return from_samples(read_pgm_samples(path), path); }

void write_png_gray(const std::filesystem::path& path, const GrayImage& img, int bit_depth) {
  write_png(path, gray_samples(img, bit_depth));
}

GrayImage read_png_gray(const std::filesystem::path& path) { return from_samples(read_png(path), path); }

void write_image(const std::filesystem::path& path, const GrayImage& img, int bit_depth) {
  if (is_png(path)) write_png_gray(path, img, bit_depth);
  else if (path.extension() == ".pgm") write_pgm(path, img, bit_depth);
  else fail(ErrorCode::UnsupportedDtype, path.string() + ": unknown image extension (use .png or .pgm)");
}

GrayImage read_image(const std::filesystem::path& path) { return from_samples(read_any(path), path); }

void write_mask(const std::filesystem::path& path, const BinaryMask& mask) {
  Samples s{mask.height(), mask.width(), 1, 8, {}};
  s.values.reserve(mask.data().size());
  for (auto v : mask.data()) s.values.push_back(v ? 255 : 0);
  if (is_png(path)) write_png(path, s);
  else write_pgm_samples(path, s);
}

BinaryMask read_mask(const std::filesystem::path& path) {
  const auto s = read_any(path);
  if (s.channels != 1 || s.bit_depth != 8) fail(ErrorCode::MalformedMask, path.string() + ": mask must be 8-bit gray");
  std::vector<std::uint8_t> data(s.values.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto v = s.values[i];
    if (v != 0 && v != 255) {
      fail(ErrorCode::MalformedMask, path.string() + ": pixel " + std::to_string(i) + " has value " + std::to_string(v));
    }
    data[i] = v == 255 ? 1 : 0;
  }
  return BinaryMask(s.height, s.width, std::move(data));
}

void write_png_rgb(const std::filesystem::path& path, const RgbImage& img) {
  if (img.data.size() != img.height * img.width * 3) fail(ErrorCode::ShapeMismatch, "RGB buffer size");
  Samples s{img.height, img.width, 3, 8, {img.data.begin(), img.data.end()}};
  write_png(path, s);
}

RgbImage read_png_rgb(const std::filesystem::path& path) {
  const auto s = read_png(path);
  if (s.channels != 3 || s.bit_depth != 8) fail(ErrorCode::UnsupportedDtype, path.string() + ": expected 8-bit RGB");
  RgbImage img{s.height, s.width, {}};
  img.data.reserve(s.values.size());
  for (auto v : s.values) img.data.push_back(static_cast<std::uint8_t>(v));
  return img;
}

}  // namespace segunc
