#include "segunc/npy.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>

namespace segunc {

static_assert(std::endian::native == std::endian::little, "NPY I/O assumes a little-endian host");

namespace {

constexpr char kMagic[] = "\x93NUMPY";
constexpr std::size_t kMagicLen = 6;
constexpr std::size_t kPreludeLen = 10;  // magic + version + u16 header length

std::string shape_literal(std::span<const std::size_t> shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    s += std::to_string(shape[i]);
    if (shape.size() == 1 || i + 1 < shape.size()) s += ",";
    if (i + 1 < shape.size()) s += " ";
  }
  return s + ")";
}

std::size_t product(std::span<const std::size_t> shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::vector<char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoFailure, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const char> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoFailure, "cannot create " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::IoFailure, "write failed for " + path.string());
}

}  // namespace

std::vector<char> encode_npy(std::span<const std::size_t> shape, std::span<const double> data, NpyDtype dtype) {
  if (product(shape) != data.size()) fail(ErrorCode::ShapeMismatch, "npy: shape does not match data length");
  std::string header = std::string("{'descr': '") + (dtype == NpyDtype::Float32 ? "<f4" : "<f8") +
                       "', 'fortran_order': False, 'shape': " + shape_literal(shape) + ", }";
  // Pad so the payload starts on a 64-byte boundary; the header ends in '\n'.
  const std::size_t unpadded = kPreludeLen + header.size() + 1;
  header.append((64 - unpadded % 64) % 64, ' ');
  header.push_back('\n');

  std::vector<char> out(kMagic, kMagic + kMagicLen);
  out.push_back(1);
  out.push_back(0);
  const auto len = static_cast<std::uint16_t>(header.size());
  out.push_back(static_cast<char>(len & 0xFF));
  out.push_back(static_cast<char>(len >> 8));
  out.insert(out.end(), header.begin(), header.end());
  const std::size_t width = dtype == NpyDtype::Float32 ? 4 : 8;
  const std::size_t start = out.size();
  out.resize(start + data.size() * width);
  char* dst = out.data() + start;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (dtype == NpyDtype::Float32) {
      const auto v = static_cast<float>(data[i]);
      std::memcpy(dst + i * 4, &v, 4);
    } else {
      std::memcpy(dst + i * 8, &data[i], 8);
    }
  }
  return out;
}

NpyArray decode_npy(std::span<const char> bytes, DtypePolicy policy) {
  if (bytes.size() < kPreludeLen || std::memcmp(bytes.data(), kMagic, kMagicLen) != 0) {
    fail(ErrorCode::MalformedHeader, "not an NPY file");
  }
  const auto major = static_cast<unsigned char>(bytes[6]);
  std::size_t header_len = 0, prelude = kPreludeLen;
  if (major == 1) {
    header_len = static_cast<unsigned char>(bytes[8]) | (static_cast<std::size_t>(static_cast<unsigned char>(bytes[9])) << 8);
  } else if (major == 2 || major == 3) {
    if (bytes.size() < 12) fail(ErrorCode::MalformedHeader, "truncated NPY prelude");
    for (int i = 0; i < 4; ++i) header_len |= static_cast<std::size_t>(static_cast<unsigned char>(bytes[8 + i])) << (8 * i);
    prelude = 12;
  } else {
    fail(ErrorCode::MalformedHeader, "unsupported NPY version " + std::to_string(major));
  }
  if (bytes.size() < prelude + header_len) fail(ErrorCode::MalformedHeader, "truncated NPY header");
  const std::string header(bytes.data() + prelude, header_len);

  static const std::regex descr_re(R"('descr'\s*:\s*'([^']*)')");
  static const std::regex order_re(R"('fortran_order'\s*:\s*(True|False))");
  static const std::regex shape_re(R"('shape'\s*:\s*\(([^)]*)\))");
  std::smatch m_descr, m_order, m_shape;
  if (!std::regex_search(header, m_descr, descr_re) || !std::regex_search(header, m_order, order_re) ||
      !std::regex_search(header, m_shape, shape_re)) {
    fail(ErrorCode::MalformedHeader, "NPY header lacks descr/fortran_order/shape: " + header);
  }

  NpyArray arr;
  const std::string descr = m_descr[1];
  if (descr == "<f4") {
    arr.dtype = NpyDtype::Float32;
  } else if (descr == "<f8") {
    if (policy == DtypePolicy::Strict) fail(ErrorCode::UnsupportedDtype, "float64 payload (strict mode)");
    arr.dtype = NpyDtype::Float64;
  } else {
    fail(ErrorCode::UnsupportedDtype, "dtype " + descr);
  }
  if (m_order[1] == "True") fail(ErrorCode::UnsupportedDtype, "Fortran-ordered arrays are not supported");

  std::stringstream dims(m_shape[1].str());
  std::string tok;
  while (std::getline(dims, tok, ',')) {
    const auto first = tok.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    try {
      arr.shape.push_back(static_cast<std::size_t>(std::stoull(tok.substr(first))));
    } catch (const std::exception&) {
      fail(ErrorCode::MalformedHeader, "bad shape entry '" + tok + "'");
    }
  }

  const std::size_t n = product(arr.shape);
  const std::size_t width = arr.dtype == NpyDtype::Float32 ? 4 : 8;
  const std::size_t offset = prelude + header_len;
  if (bytes.size() - offset != n * width) {
    fail(ErrorCode::ShapeMismatch, "NPY payload holds " + std::to_string(bytes.size() - offset) + " bytes, shape needs " +
                                       std::to_string(n * width));
  }
  arr.data.resize(n);
  const char* src = bytes.data() + offset;
  for (std::size_t i = 0; i < n; ++i) {
    if (arr.dtype == NpyDtype::Float32) {
      float v;
      std::memcpy(&v, src + i * 4, 4);
      arr.data[i] = v;
    } else {
      std::memcpy(&arr.data[i], src + i * 8, 8);
    }
  }
  return arr;
}

void write_npy(const std::filesystem::path& path, std::span<const std::size_t> shape, std::span<const double> data,
               NpyDtype dtype) {
  write_file(path, encode_npy(shape, data, dtype));
}

NpyArray read_npy(const std::filesystem::path& path, DtypePolicy policy) {
  const auto bytes = read_file(path);
  try {
    return decode_npy(bytes, policy);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

namespace {

// [.., C, H, W] class-planar block -> pixel-major.
std::vector<double> planar_to_pixel_major(std::span<const double> planar, std::size_t classes, std::size_t pixels) {
  std::vector<double> out(classes * pixels);
  for (std::size_t c = 0; c < classes; ++c) {
    for (std::size_t p = 0; p < pixels; ++p) out[p * classes + c] = planar[c * pixels + p];
  }
  return out;
}

void append_planar(std::vector<double>& out, const ProbMap& map) {
  const std::size_t pixels = map.shape().pixels();
  for (std::size_t c = 0; c < map.classes(); ++c) {
    for (std::size_t p = 0; p < pixels; ++p) out.push_back(map.at(p, c));
  }
}

}  // namespace

void write_volume(const std::filesystem::path& path, const ProbVolume& vol) {
  const std::size_t shape[] = {vol.passes(), vol.classes(), vol.shape().height, vol.shape().width};
  std::vector<double> data;
  data.reserve(shape[0] * shape[1] * shape[2] * shape[3]);
  for (const auto& m : vol.maps()) append_planar(data, m);
  write_npy(path, shape, data, NpyDtype::Float32);
}

ProbVolume volume_from_array(const NpyArray& array, Provenance provenance, std::vector<TransformRecord> transforms) {
  if (array.shape.size() != 4) {
    fail(ErrorCode::ShapeMismatch, "volume must be 4-D [T, C, H, W], got " + std::to_string(array.shape.size()) + "-D");
  }
  const std::size_t t = array.shape[0], c = array.shape[1], h = array.shape[2], w = array.shape[3];
  if (t == 0) fail(ErrorCode::EmptyVolume, "volume has zero passes");
  if (c < 2) fail(ErrorCode::InvalidArgument, "volume has " + std::to_string(c) + " class(es); at least 2 are needed");
  std::vector<ProbMap> maps;
  maps.reserve(t);
  const std::size_t block = c * h * w;
  for (std::size_t i = 0; i < t; ++i) {
    std::span<const double> planar(array.data.data() + i * block, block);
    try {
      maps.emplace_back(h, w, c, planar_to_pixel_major(planar, c, h * w), kVolumeSumTolerance);
    } catch (const Error& e) {
      throw Error(e.code(), "pass " + std::to_string(i) + ": " + e.what());
    }
  }
  return ProbVolume(std::move(maps), provenance, std::move(transforms));
}

ProbVolume read_volume(const std::filesystem::path& path, DtypePolicy policy, Provenance provenance,
                       std::vector<TransformRecord> transforms) {
  return volume_from_array(read_npy(path, policy), provenance, std::move(transforms));
}

void write_prob_map(const std::filesystem::path& path, const ProbMap& map) {
  const std::size_t shape[] = {map.classes(), map.height(), map.width()};
  std::vector<double> data;
  data.reserve(map.data().size());
  append_planar(data, map);
  write_npy(path, shape, data, NpyDtype::Float32);
}

ProbMap read_prob_map(const std::filesystem::path& path, DtypePolicy policy) {
  const auto arr = read_npy(path, policy);
  if (arr.shape.size() != 3) fail(ErrorCode::ShapeMismatch, path.string() + ": probability map must be [C, H, W]");
  const std::size_t c = arr.shape[0], h = arr.shape[1], w = arr.shape[2];
  if (c < 2) fail(ErrorCode::InvalidArgument, path.string() + ": at least 2 classes are needed");
  return ProbMap(h, w, c, planar_to_pixel_major(arr.data, c, h * w), kVolumeSumTolerance);
}

void write_entropy(const std::filesystem::path& path, const EntropyMap& ent) {
  const std::size_t shape[] = {ent.height(), ent.width()};
  write_npy(path, shape, ent.data(), NpyDtype::Float64);
}

EntropyMap read_entropy(const std::filesystem::path& path, std::size_t classes, LogBase base) {
  const auto arr = read_npy(path, DtypePolicy::Lenient);
  if (arr.shape.size() != 2) fail(ErrorCode::ShapeMismatch, path.string() + ": entropy map must be [H, W]");
  return EntropyMap(arr.shape[0], arr.shape[1], classes, base, arr.data);
}

}  // namespace segunc
