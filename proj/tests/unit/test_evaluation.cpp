#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "segunc/evaluation.hpp"
#include "segunc/uncertainty.hpp"
#include "support.hpp"

using namespace segunc;

namespace {

BinaryMask mask_from_bits(unsigned bits, std::size_t n) {
  std::vector<std::uint8_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = (bits >> i) & 1u;
  return BinaryMask(1, n, std::move(v));
}

struct Oracle {
  double tp = 0, fp = 0, fn = 0, tn = 0;
};

Oracle count_oracle(const BinaryMask& pred, const BinaryMask& gt) {
  Oracle o;
  for (std::size_t i = 0; i < pred.data().size(); ++i) {
    const bool p = pred.data()[i], t = gt.data()[i];
    if (p && t) ++o.tp;
    else if (p) ++o.fp;
    else if (t) ++o.fn;
    else ++o.tn;
  }
  return o;
}

// Textbook sample correlation from raw sums, long double.
double pearson_oracle(const std::vector<double>& x, const std::vector<double>& y) {
  const long double n = x.size();
  long double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += static_cast<long double>(x[i]) * x[i];
    syy += static_cast<long double>(y[i]) * y[i];
    sxy += static_cast<long double>(x[i]) * y[i];
  }
  const long double cov = sxy - sx * sy / n;
  return static_cast<double>(cov / std::sqrt((sxx - sx * sx / n) * (syy - sy * sy / n)));
}

}  // namespace

TEST_CASE("confusion examples") {
  const BinaryMask ones(2, 2, {1, 1, 1, 1});
  CHECK(confusion(ones, ones) == ConfusionCounts{4, 0, 0, 0});

  const BinaryMask pred(1, 4, {1, 1, 0, 0}), gt(1, 4, {1, 0, 1, 0});
  CHECK(confusion(pred, gt) == ConfusionCounts{1, 1, 1, 1});
  const BinaryMask agree(1, 4, {1, 0, 0, 1});
  CHECK(confusion(pred, gt, agree) == ConfusionCounts{1, 0, 0, 1});

  CHECK_THROWS_AS(confusion(pred, BinaryMask(2, 2, {1, 0, 1, 0})), Error);
  CHECK_THROWS_AS(confusion(pred, gt, BinaryMask(1, 3, {1, 1, 1})), Error);
}

TEST_CASE("metrics examples") {
  const auto m = metrics({1, 1, 1, 0});
  CHECK(m.dice == 0.5);
  CHECK(m.precision == 0.5);
  CHECK(m.recall == 0.5);
  CHECK_FALSE(m.degenerate);

  const auto perfect = metrics({7, 0, 0, 3});
  CHECK(perfect.dice == 1.0);
  CHECK(perfect.precision == 1.0);
  CHECK(perfect.recall == 1.0);

  const auto both_empty = metrics({0, 0, 0, 9});
  CHECK(both_empty.dice == 1.0);
  CHECK(both_empty.precision == 1.0);
  CHECK(both_empty.recall == 1.0);
  CHECK(both_empty.degenerate);

  const auto empty_truth = metrics({0, 3, 0, 6});
  CHECK(empty_truth.dice == 0.0);
  CHECK(empty_truth.precision == 0.0);
  CHECK_FALSE(empty_truth.recall);

  const auto empty_pred = metrics({0, 0, 3, 6});
  CHECK(empty_pred.dice == 0.0);
  CHECK_FALSE(empty_pred.precision);
  CHECK(empty_pred.recall == 0.0);
}

TEST_CASE("metrics agree with brute-force counting on all 4-pixel mask pairs") {
  for (unsigned a = 0; a < 16; ++a) {
    for (unsigned b = 0; b < 16; ++b) {
      const auto pred = mask_from_bits(a, 4), gt = mask_from_bits(b, 4);
      const auto o = count_oracle(pred, gt);
      const auto c = confusion(pred, gt);
      CHECK(c == ConfusionCounts{std::size_t(o.tp), std::size_t(o.fp), std::size_t(o.fn), std::size_t(o.tn)});
      const auto m = metrics(c);
      if (o.tp + o.fp + o.fn == 0) {
        CHECK(m.degenerate);
        continue;
      }
      CHECK(m.dice == 2 * o.tp / (2 * o.tp + o.fp + o.fn));
      if (o.tp + o.fp > 0) CHECK(m.precision == o.tp / (o.tp + o.fp));
      else CHECK_FALSE(m.precision);
      if (o.tp + o.fn > 0) CHECK(m.recall == o.tp / (o.tp + o.fn));
      else CHECK_FALSE(m.recall);

      // Swapping prediction and truth swaps precision and recall and fixes dice.
      const auto s = metrics(confusion(gt, pred));
      CHECK(s.dice == m.dice);
      CHECK(s.precision == m.recall);
      CHECK(s.recall == m.precision);
    }
  }
}

TEST_CASE("binarize gate") {
  const auto m = testing::binary_map(1, 3, {0.5, 0.4999, 1.0});
  CHECK(binarize(m) == BinaryMask(1, 3, {1, 0, 1}));
  CHECK(binarize(testing::binary_map(2, 2, {0.5, 0.5, 0.5, 0.5})).count() == 4);
}

TEST_CASE("binarize of a unanimous volume equals per-pass argmax") {
  std::mt19937_64 g(73);
  const auto truth = testing::random_mask(g, 6, 6);
  std::vector<double> fg;
  for (auto v : truth.data()) fg.push_back(v ? 0.8 : 0.2);
  std::vector<ProbMap> passes(5, testing::binary_map(6, 6, fg));
  CHECK(binarize(aggregate_passes(passes)) == truth);
}

TEST_CASE("entropy cutoff order statistic") {
  std::vector<double> e(40);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = static_cast<double>((i * 17) % 40) / 40.0;
  // ceil(0.975 * 40) = 39 -> 39th smallest, i.e. the second largest
  CHECK(entropy_cutoff(ThresholdPolicy::quantile(0.975), e) == 38.0 / 40.0);
  CHECK(entropy_cutoff(ThresholdPolicy::exclude_fraction(0.025), e) == 38.0 / 40.0);
  CHECK(entropy_cutoff(ThresholdPolicy::absolute(0.3), e) == 0.3);
  CHECK_THROWS_AS(ThresholdPolicy::quantile(1.0), Error);
  CHECK_THROWS_AS(ThresholdPolicy::quantile(0.0), Error);
  CHECK_THROWS_AS(ThresholdPolicy::absolute(-0.1), Error);
}

TEST_CASE("quantile exclusion bound holds with ties") {
  std::mt19937_64 g(79);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = testing::pick(g, 1, 200);
    std::vector<double> e(n);
    // Coarse levels force ties.
    for (auto& v : e) v = static_cast<double>(testing::pick(g, 0, 9)) / 10.0;
    const double q = 0.5 + 0.49 * testing::uniform(g);
    const double cutoff = entropy_cutoff(ThresholdPolicy::quantile(q), e);
    const auto above = std::count_if(e.begin(), e.end(), [&](double v) { return v > cutoff; });
    const auto ties = std::count(e.begin(), e.end(), cutoff);
    CHECK(static_cast<double>(above) <= (1.0 - q) * n + static_cast<double>(ties) + 1e-9);
    CHECK(static_cast<double>(above) <= static_cast<double>(n) - std::ceil(q * n) + 1e-9);
  }
}

TEST_CASE("near-one quantile excludes nothing on distinct values") {
  std::vector<double> e(1000);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = static_cast<double>(i) / 1000.0;
  const double cutoff = entropy_cutoff(ThresholdPolicy::quantile(1.0 - 1e-9), e);
  CHECK(std::count_if(e.begin(), e.end(), [&](double v) { return v > cutoff; }) == 0);
}

TEST_CASE("thresholded_eval examples") {
  SUBCASE("zero entropy changes nothing") {
    const auto mean = testing::binary_map(2, 2, {1, 0, 1, 0});
    const auto ent = entropy_map(mean);
    const BinaryMask gt(2, 2, {1, 1, 0, 0});
    const auto r = thresholded_eval(mean, ent, gt);
    CHECK(r.excluded_fraction == 0.0);
    CHECK(r.thresholded.dice == r.plain.dice);
    CHECK(r.thresholded.precision == r.plain.precision);
    CHECK(r.thresholded.recall == r.plain.recall);
  }
  SUBCASE("errors sitting on the top 2% of entropy are all excluded") {
    // 100 pixels: 50 drusen predicted with p=0.99, 48 background with p=0.01,
    // and 2 errors at p=0.6 / p=0.4 carrying the highest entropy.
    std::vector<double> fg(100);
    std::vector<std::uint8_t> gt(100);
    for (std::size_t i = 0; i < 100; ++i) {
      fg[i] = i < 50 ? 0.99 : 0.01;
      gt[i] = i < 50 ? 1 : 0;
    }
    fg[60] = 0.6;  // false positive
    fg[10] = 0.4;  // false negative
    const auto mean = testing::binary_map(10, 10, fg);
    const auto ent = entropy_map(mean);
    const BinaryMask truth(10, 10, gt);
    const auto r = thresholded_eval(mean, ent, truth, ThresholdPolicy::quantile(0.98));
    // Plain: tp 49, fp 1, fn 1
    CHECK(r.plain.dice == doctest::Approx(98.0 / 100.0));
    CHECK(r.thresholded.dice == 1.0);
    CHECK(r.thresholded.dice > r.plain.dice);
    CHECK(r.excluded_fraction == 0.02);
    // Brute-force recount on the kept pixels.
    const auto keep = inclusion_mask(ent, r.cutoff);
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < 100; ++i) {
      if (!keep.data()[i]) continue;
      const bool p = fg[i] >= 0.5;
      tp += p && gt[i];
      fp += p && !gt[i];
      fn += !p && gt[i];
    }
    CHECK(tp == 49);
    CHECK(fp == 0);
    CHECK(fn == 0);
  }
  SUBCASE("absolute cutoff above one bit excludes nothing") {
    std::mt19937_64 g(83);
    std::vector<double> fg(64);
    for (auto& p : fg) p = testing::uniform(g);
    const auto mean = testing::binary_map(8, 8, fg);
    const auto r = thresholded_eval(mean, entropy_map(mean), testing::random_mask(g, 8, 8),
                                    ThresholdPolicy::absolute(1.0 + 1e-9));
    CHECK(r.excluded_fraction == 0.0);
  }
  SUBCASE("report fields") {
    const auto mean = testing::binary_map(1, 4, {0.9, 0.6, 0.1, 0.5});
    const auto ent = entropy_map(mean);
    const auto r = thresholded_eval(mean, ent, BinaryMask(1, 4, {1, 1, 0, 0}));
    const auto u = average_drusen_uncertainty(mean, ent);
    CHECK(r.u_avg == u.u_avg);
    CHECK(r.u_avg_pixels == 3);
    CHECK(r.excluded_fraction < 1.0);
  }
  SUBCASE("shape mismatch") {
    const auto mean = testing::binary_map(1, 4, {0.9, 0.6, 0.1, 0.5});
    CHECK_THROWS_AS(thresholded_eval(mean, entropy_map(mean), BinaryMask::zeros(2, 2)), Error);
  }
}

TEST_CASE("size classes") {
  const SizeThresholds t(500, 2000);
  CHECK(size_class_of_count(1999, t) == SizeClass::Medium);
  CHECK(size_class_of_count(2000, t) == SizeClass::Large);
  CHECK(size_class_of_count(499, t) == SizeClass::Small);
  CHECK(size_class_of_count(500, t) == SizeClass::Medium);
  CHECK_FALSE(size_class(BinaryMask::zeros(3, 3), t));
  CHECK(size_class(BinaryMask(1, 2, {1, 1}), t) == SizeClass::Small);
}

TEST_CASE("tertile thresholds split distinct counts into near-equal groups") {
  std::mt19937_64 g(89);
  for (std::size_t n = 3; n <= 60; ++n) {
    std::vector<std::size_t> counts(n);
    for (std::size_t i = 0; i < n; ++i) counts[i] = 10 + 7 * i;
    std::shuffle(counts.begin(), counts.end(), g);
    const auto t = tertile_thresholds(counts);
    std::size_t groups[3] = {0, 0, 0};
    for (auto c : counts) ++groups[static_cast<int>(size_class_of_count(c, t))];
    const auto [lo, hi] = std::minmax({groups[0], groups[1], groups[2]});
    CHECK(hi - lo <= 1);
  }
  CHECK_THROWS_AS(tertile_thresholds(std::vector<std::size_t>{1, 2}), Error);
}

TEST_CASE("pearson") {
  const std::vector<double> x{1, 2, 3, 4}, y{2, 1, 4, 3};
  CHECK(std::abs(pearson(x, y) - pearson_oracle(x, y)) <= 1e-12);
  CHECK(std::abs(pearson(x, y) - 0.6) <= 1e-12);

  std::vector<double> neg, affine;
  for (double v : x) {
    neg.push_back(-v);
    affine.push_back(2 * v + 3);
  }
  CHECK(std::abs(pearson(x, neg) + 1.0) <= 1e-12);
  CHECK(std::abs(pearson(x, affine) - 1.0) <= 1e-12);

  CHECK_THROWS_AS(pearson(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}), Error);
  CHECK_THROWS_AS(pearson(std::vector<double>{1}, std::vector<double>{1}), Error);
  CHECK_THROWS_AS(pearson(x, std::vector<double>{1, 2, 3}), Error);
  try {
    pearson(std::vector<double>{0.1, 0.1, 0.1}, std::vector<double>{1, 2, 3});
    FAIL("no error raised");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateSeries);
  }
}

TEST_CASE("pearson is affine invariant and flips under negation") {
  std::mt19937_64 g(97);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = testing::pick(g, 2, 50);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = testing::uniform(g);
      y[i] = 0.3 * x[i] + testing::uniform(g);
    }
    const double r = pearson(x, y);
    CHECK(std::abs(r - pearson_oracle(x, y)) <= 1e-12);
    const double a = 0.1 + 5 * testing::uniform(g), b = 10 * testing::uniform(g) - 5;
    std::vector<double> xa(n), yn(n);
    for (std::size_t i = 0; i < n; ++i) {
      xa[i] = a * x[i] + b;
      yn[i] = -y[i];
    }
    CHECK(std::abs(pearson(xa, y) - r) <= 1e-12);
    CHECK(std::abs(pearson(x, yn) + r) <= 1e-12);
  }
}
