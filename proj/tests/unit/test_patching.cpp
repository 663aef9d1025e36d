#include <doctest.h>

#include <algorithm>

#include "segunc/patching.hpp"
#include "support.hpp"

using namespace segunc;

namespace {

// Anchors by explicit enumeration: step until the window would overhang, then
// add the snapped final anchor if coverage is not yet complete.
std::vector<std::size_t> anchors_oracle(std::size_t extent, std::size_t window, std::size_t stride) {
  std::vector<std::size_t> out;
  std::size_t a = 0;
  while (a + window <= extent) {
    out.push_back(a);
    a += stride;
  }
  if (out.back() + window < extent) out.push_back(extent - window);
  return out;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::IoFailure;
}

}  // namespace

TEST_CASE("grid examples") {
  const auto one = plan_grid(128, 128, 128, 128);
  REQUIRE(one.origins.size() == 1);
  CHECK(one.origins[0] == PatchOrigin{0, 0});

  CHECK(plan_grid(256, 256, 128, 128).origins.size() == 4);

  CHECK(axis_anchors(300, 128, 64) == std::vector<std::size_t>{0, 64, 128, 172});
  const auto g300 = plan_grid(300, 300, 128, 64);
  CHECK(g300.origins.size() == 16);
  CHECK(g300.origins.back() == PatchOrigin{172, 172});
  CHECK(g300.origins[1] == PatchOrigin{0, 64});
}

TEST_CASE("grid errors") {
  CHECK(code_of([] { plan_grid(100, 300, 128, 64); }) == ErrorCode::WindowTooLarge);
  CHECK(code_of([] { plan_grid(300, 300, 128, 0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { plan_grid(300, 300, 128, 129); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("anchors match enumeration and cover every pixel") {
  for (std::size_t window : {1, 3, 7, 16}) {
    for (std::size_t extent = window; extent <= 60; ++extent) {
      for (std::size_t stride = 1; stride <= window; ++stride) {
        const auto got = axis_anchors(extent, window, stride);
        CHECK(got == anchors_oracle(extent, window, stride));
        std::vector<int> hits(extent, 0);
        for (auto a : got) {
          CHECK(a + window <= extent);
          for (std::size_t i = a; i < a + window; ++i) ++hits[i];
        }
        CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h >= 1; }));
      }
    }
  }
}

TEST_CASE("extract crops bit-exactly") {
  std::mt19937_64 g(61);
  const auto img = testing::random_image(g, 40, 50);
  const auto grid = plan_grid(40, 50, 16, 12);
  const auto patches = extract(img, grid);
  REQUIRE(patches.size() == grid.origins.size());
  for (std::size_t k = 0; k < patches.size(); ++k) {
    const auto o = grid.origins[k];
    for (std::size_t r = 0; r < 16; ++r) {
      for (std::size_t c = 0; c < 16; ++c) CHECK(patches[k].at(r, c) == img.at(o.row + r, o.col + c));
    }
  }

  const auto whole = plan_grid(40, 50, 40, 40);
  CHECK_THROWS_AS(extract(testing::random_image(g, 41, 50), whole), Error);
  const auto square = plan_grid(40, 40, 40, 40);
  const auto sq = testing::random_image(g, 40, 40);
  CHECK(extract(sq, square).front() == sq);
}

TEST_CASE("a bright spot shows up exactly in the covering patches") {
  std::vector<double> v(300 * 300, 0.0);
  v[10 * 300 + 10] = 1.0;
  const GrayImage img(300, 300, v);
  for (std::size_t stride : {64, 128}) {
    const auto grid = plan_grid(300, 300, 128, stride);
    const auto patches = extract(img, grid);
    for (std::size_t k = 0; k < patches.size(); ++k) {
      const auto o = grid.origins[k];
      const bool covers = o.row <= 10 && 10 < o.row + 128 && o.col <= 10 && 10 < o.col + 128;
      const bool lit = std::any_of(patches[k].data().begin(), patches[k].data().end(), [](double x) { return x > 0; });
      CHECK(covers == lit);
    }
  }
}

TEST_CASE("crop of masks, maps and entropy maps") {
  const BinaryMask m(3, 3, {1, 0, 0, 0, 1, 0, 0, 0, 1});
  CHECK(crop(m, {1, 1}, 2) == BinaryMask(2, 2, {1, 0, 0, 1}));
  const auto pm = testing::binary_map(2, 2, {0.1, 0.2, 0.3, 0.4});
  CHECK(crop(pm, {1, 0}, 1).at(0, 1) == 0.3);
  const EntropyMap e(2, 2, 2, LogBase::Bits, {0.1, 0.2, 0.3, 0.4});
  CHECK(crop(e, {0, 1}, 1).data()[0] == 0.2);
  CHECK_THROWS_AS(crop(m, {2, 2}, 2), Error);
}

TEST_CASE("stitch examples") {
  SUBCASE("constant patches give a constant map") {
    const auto grid = plan_grid(20, 30, 16, 7);
    std::vector<ProbMap> patches(grid.origins.size(), testing::binary_map(16, 16, std::vector<double>(256, 0.7)));
    const auto out = stitch(patches, grid);
    CHECK(out.shape() == Shape{20, 30});
    for (std::size_t p = 0; p < 600; ++p) {
      CHECK(out.at(p, 1) == doctest::Approx(0.7).epsilon(1e-15));
      CHECK(out.at(p, 0) == doctest::Approx(0.3).epsilon(1e-15));
    }
  }
  SUBCASE("single patch is returned as is") {
    std::mt19937_64 g(67);
    const auto m = testing::random_map(g, 16, 16, 3);
    const auto grid = plan_grid(16, 16, 16, 16);
    CHECK(stitch(std::vector<ProbMap>{m}, grid) == m);
  }
  SUBCASE("two disagreeing windows average on the overlap") {
    const auto grid = plan_grid(2, 3, 2, 1);
    REQUIRE(grid.origins.size() == 2);
    const auto bg = testing::binary_map(2, 2, {0, 0, 0, 0});
    const auto fg = testing::binary_map(2, 2, {1, 1, 1, 1});
    const auto out = stitch(std::vector<ProbMap>{bg, fg}, grid);
    for (std::size_t r = 0; r < 2; ++r) {
      CHECK(out.at(r * 3 + 0, 1) == 0.0);
      CHECK(out.at(r * 3 + 1, 1) == 0.5);
      CHECK(out.at(r * 3 + 1, 0) == 0.5);
      CHECK(out.at(r * 3 + 2, 1) == 1.0);
    }
  }
  SUBCASE("errors") {
    const auto grid = plan_grid(20, 20, 16, 4);
    const auto ok = testing::binary_map(16, 16, std::vector<double>(256, 0.5));
    CHECK(code_of([&] { stitch(std::vector<ProbMap>{ok}, grid); }) == ErrorCode::CountMismatch);
    std::vector<ProbMap> bad(grid.origins.size(), ok);
    bad[1] = testing::binary_map(15, 16, std::vector<double>(240, 0.5));
    CHECK(code_of([&] { stitch(bad, grid); }) == ErrorCode::ShapeMismatch);
  }
}

TEST_CASE("stitch is a per-pixel mean and ignores patch order") {
  std::mt19937_64 g(71);
  const auto grid = plan_grid(23, 19, 8, 5);
  std::vector<ProbMap> patches;
  for (std::size_t k = 0; k < grid.origins.size(); ++k) patches.push_back(testing::random_map(g, 8, 8, 3));
  const auto out = stitch(patches, grid);
  for (std::size_t r = 0; r < 23; ++r) {
    for (std::size_t c = 0; c < 19; ++c) {
      std::vector<long double> sum(3, 0.0L);
      int n = 0;
      for (std::size_t k = 0; k < grid.origins.size(); ++k) {
        const auto o = grid.origins[k];
        if (r < o.row || r >= o.row + 8 || c < o.col || c >= o.col + 8) continue;
        ++n;
        for (std::size_t cls = 0; cls < 3; ++cls) sum[cls] += patches[k].at((r - o.row) * 8 + (c - o.col), cls);
      }
      for (std::size_t cls = 0; cls < 3; ++cls) {
        CHECK(std::abs(out.at(r * 19 + c, cls) - static_cast<double>(sum[cls] / n)) <= 1e-12);
      }
    }
  }

  // Reordering patches together with their origins leaves the result unchanged.
  std::vector<std::size_t> order(grid.origins.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), g);
  PatchGrid shuffled = grid;
  std::vector<ProbMap> reordered;
  for (std::size_t i = 0; i < order.size(); ++i) {
    shuffled.origins[i] = grid.origins[order[i]];
    reordered.push_back(patches[order[i]]);
  }
  CHECK(stitch(reordered, shuffled) == out);
}
