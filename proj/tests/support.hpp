#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "segunc/types.hpp"

namespace testing {

namespace fs = std::filesystem;

/// Scratch directory removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("segunc_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline double uniform(std::mt19937_64& g) { return std::uniform_real_distribution<double>(0.0, 1.0)(g); }

inline std::size_t pick(std::mt19937_64& g, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(g);
}

inline segunc::GrayImage random_image(std::mt19937_64& g, std::size_t h, std::size_t w) {
  std::vector<double> v(h * w);
  for (auto& x : v) x = uniform(g);
  return segunc::GrayImage(h, w, std::move(v));
}

inline segunc::BinaryMask random_mask(std::mt19937_64& g, std::size_t h, std::size_t w, double p = 0.5) {
  std::vector<std::uint8_t> v(h * w);
  for (auto& x : v) x = uniform(g) < p ? 1 : 0;
  return segunc::BinaryMask(h, w, std::move(v));
}

/// Random simplex points; the last class absorbs the rounding so sums are
/// exact to a few ulps.
inline segunc::ProbMap random_map(std::mt19937_64& g, std::size_t h, std::size_t w, std::size_t classes) {
  std::vector<double> v(h * w * classes);
  for (std::size_t p = 0; p < h * w; ++p) {
    double total = 0.0;
    std::vector<double> raw(classes);
    for (auto& r : raw) {
      r = -std::log(1.0 - uniform(g));
      total += r;
    }
    double used = 0.0;
    for (std::size_t c = 0; c + 1 < classes; ++c) {
      v[p * classes + c] = raw[c] / total;
      used += v[p * classes + c];
    }
    v[p * classes + classes - 1] = std::max(0.0, 1.0 - used);
  }
  return segunc::ProbMap(h, w, classes, std::move(v));
}

/// Two-class map from foreground probabilities.
inline segunc::ProbMap binary_map(std::size_t h, std::size_t w, const std::vector<double>& fg) {
  std::vector<double> v;
  for (double p : fg) {
    v.push_back(1.0 - p);
    v.push_back(p);
  }
  return segunc::ProbMap(h, w, 2, std::move(v));
}

}  // namespace testing
