// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>

#include "cli/commands.hpp"
#include "segunc/evaluation.hpp"
#include "segunc/patching.hpp"
#include "segunc/report.hpp"
#include "segunc/synthetic.hpp"
#include "segunc/transforms.hpp"
#include "segunc/uncertainty.hpp"
#include "support.hpp"

using namespace segunc;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

// Records the first few failures so a FAIL line says what broke.
struct Checker {
  Outcome out;
  int failures = 0;
  void expect(bool cond, const std::string& what) {
    if (cond) return;
    out.ok = false;
    if (++failures <= 3) out.detail += (out.detail.empty() ? "" : "; ") + what;
  }
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// CLI runs with stdout muted so only the verdict lines reach the console.
int run_cli(const std::vector<std::string>& args) {
  std::ostringstream sink;
  auto* saved = std::cout.rdbuf(sink.rdbuf());
  const int rc = cli::run(args);
  std::cout.rdbuf(saved);
  return rc;
}

double entropy_oracle(std::span<const double> p) {
  long double h = 0.0L;
  for (double v : p) {
    if (v > 0.0) h -= static_cast<long double>(v) * std::log(static_cast<long double>(v));
  }
  return static_cast<double>(h / std::log(2.0L));
}

Outcome entropy_exactness() {
  Checker c;
  const std::vector<double> half{0.5, 0.5}, hot{1.0, 0.0}, skew{0.9, 0.1};
  c.expect(std::abs(entropy(half) - 1.0) <= 1e-12, "H([.5,.5]) = " + fmt(entropy(half)));
  c.expect(std::abs(entropy(hot)) <= 1e-12, "H(one-hot) = " + fmt(entropy(hot)));
  c.expect(std::abs(entropy(std::vector<double>{0.0, 1.0})) <= 1e-12, "H([0,1]) nonzero");
  c.expect(std::abs(entropy(skew) - 0.4690) <= 1e-4, "H([.9,.1]) = " + fmt(entropy(skew)));
  c.expect(std::abs(entropy(skew) - entropy_oracle(skew)) <= 1e-12, "H([.9,.1]) differs from oracle");
  c.out.detail = c.out.ok ? "H([.9,.1]) = " + fmt(entropy(skew)) + " bits" : c.out.detail;
  return c.out;
}

Outcome aggregation_oracle() {
  Checker c;
  std::mt19937_64 g(20240601);
  double worst_mean = 0.0, worst_jensen = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t T = testing::pick(g, 1, 10), C = testing::pick(g, 2, 3), N = testing::pick(g, 1, 8);
    std::vector<ProbMap> maps;
    for (std::size_t t = 0; t < T; ++t) maps.push_back(testing::random_map(g, N, N, C));
    const auto mean = aggregate_passes(ProbVolume(maps, Provenance::McDropout));
    const auto h = entropy_map(mean);
    for (std::size_t p = 0; p < N * N; ++p) {
      long double avg_h = 0.0L;
      for (std::size_t cls = 0; cls < C; ++cls) {
        long double s = 0.0L;
        for (const auto& m : maps) s += m.at(p, cls);
        worst_mean = std::max(worst_mean, std::abs(mean.at(p, cls) - static_cast<double>(s / T)));
      }
      for (const auto& m : maps) avg_h += entropy_oracle(m.pixel(p));
      worst_jensen = std::max(worst_jensen, static_cast<double>(avg_h / T) - h.data()[p]);
    }
  }
  c.expect(worst_mean <= 1e-12, "mean error " + fmt(worst_mean));
  c.expect(worst_jensen <= 1e-9, "Jensen violated by " + fmt(worst_jensen));
  if (c.out.ok) c.out.detail = "1000 volumes, max mean error " + fmt(worst_mean);
  return c.out;
}

Outcome transform_invertibility() {
  Checker c;
  std::mt19937_64 g(77);
  std::vector<TransformRecord> geometric{TransformRecord::horizontal_flip()};
  for (int k = 0; k < 4; ++k) geometric.push_back(TransformRecord::rotate90(k));
  const std::vector<TransformRecord> photometric{TransformRecord::brightness(0.2), TransformRecord::brightness(-0.2),
                                                 TransformRecord::contrast(0.8), TransformRecord::contrast(1.2),
                                                 TransformRecord::gaussian_blur(0.5), TransformRecord::gaussian_blur(1.5)};
  std::size_t cases = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t h = testing::pick(g, 1, 64), w = testing::pick(g, 1, 64);
    const auto img = testing::random_image(g, h, w);
    const auto map = testing::random_map(g, h, w, testing::pick(g, 2, 3));
    for (const auto& t : geometric) {
      c.expect(invert(t, lift(apply(t, img))) == lift(img), "image round trip " + std::string(to_string(t.kind)));
      const auto moved = apply_geometry(t, lift(map));
      const ProbMap as_map(moved.shape.height, moved.shape.width, map.classes(), moved.data);
      c.expect(invert(t, as_map, map.shape()) == map, "map round trip " + std::string(to_string(t.kind)));
      ++cases;
    }
    for (const auto& t : photometric) {
      const auto back = invert(t, map);
      c.expect(back.data().size() == map.data().size() &&
                   std::memcmp(back.data().data(), map.data().data(), map.data().size() * sizeof(double)) == 0,
               "photometric inverse not identity");
      ++cases;
    }
  }
  if (c.out.ok) c.out.detail = std::to_string(cases) + " round trips";
  return c.out;
}

Outcome metrics_oracle() {
  Checker c;
  auto bits = [](unsigned b) {
    std::vector<std::uint8_t> v(4);
    for (unsigned i = 0; i < 4; ++i) v[i] = (b >> i) & 1u;
    return BinaryMask(2, 2, std::move(v));
  };
  for (unsigned a = 0; a < 16; ++a) {
    for (unsigned b = 0; b < 16; ++b) {
      const auto pred = bits(a), gt = bits(b);
      double tp = 0, fp = 0, fn = 0;
      for (unsigned i = 0; i < 4; ++i) {
        const bool p = (a >> i) & 1u, t = (b >> i) & 1u;
        tp += p && t;
        fp += p && !t;
        fn += !p && t;
      }
      const auto m = metrics(confusion(pred, gt));
      const std::string pair = "pair " + std::to_string(a) + "/" + std::to_string(b);
      if (tp + fp + fn == 0) {
        c.expect(m.degenerate && m.dice == 1.0 && m.precision == 1.0 && m.recall == 1.0, pair + " empty case");
        continue;
      }
      c.expect(!m.degenerate, pair + " flagged degenerate");
      c.expect(m.dice == 2 * tp / (2 * tp + fp + fn), pair + " dice");
      c.expect(tp + fp > 0 ? m.precision == tp / (tp + fp) : !m.precision, pair + " precision");
      c.expect(tp + fn > 0 ? m.recall == tp / (tp + fn) : !m.recall, pair + " recall");
    }
  }
  if (c.out.ok) c.out.detail = "256 pairs exact";
  return c.out;
}

Outcome thresholded_claim() {
  Checker c;
  testing::TempDir dir("acc_thr");
  const auto s = dir.path().string();
  c.expect(run_cli({"synth", "--count", "50", "--seed", "2024", "--sigma-model", "1", "--out-dir", s + "/data"}) == 0,
           "synth failed");
  c.expect(run_cli({"quantify", "--dataset", s + "/data/dataset.json", "--out-dir", s + "/q"}) == 0, "quantify failed");
  c.expect(run_cli({"evaluate", "--input", s + "/q/quantified.json", "--out", s + "/rep/run"}) == 0, "evaluate failed");
  if (!c.out.ok) return c.out;

  const auto report = read_report(dir / "rep/run.csv");
  std::string summary;
  for (Method base : {Method::Epistemic, Method::Aleatoric}) {
    const Method thr = *thresholded_variant(base);
    std::map<std::string, double> plain;
    for (const auto& r : report.image_rows()) {
      if (r.method == base) plain[r.image_id] = r.dice;
    }
    std::size_t n = 0, improved = 0;
    double excluded = 0.0;
    for (const auto& r : report.image_rows()) {
      if (r.method != thr) continue;
      ++n;
      improved += r.dice >= plain.at(r.image_id);
      excluded += r.excluded_fraction;
    }
    const double share = n ? static_cast<double>(improved) / n : 0.0;
    const double mean_excluded = n ? excluded / n : 0.0;
    const std::string label(to_string(base));
    c.expect(n == 50, label + ": " + std::to_string(n) + " images scored");
    c.expect(share >= 0.95, label + ": dice_thr >= dice on " + fmt(100 * share) + "%");
    c.expect(mean_excluded >= 0.02 && mean_excluded <= 0.03, label + ": mean excluded " + fmt(mean_excluded));
    summary += (summary.empty() ? "" : ", ") + label + " " + fmt(100 * share) + "% improved, excluded " + fmt(mean_excluded);
  }
  if (c.out.ok) c.out.detail = summary;
  return c.out;
}

Outcome correlation_claim() {
  Checker c;
  testing::TempDir dir("acc_corr");
  const auto s = dir.path().string();
  c.expect(run_cli({"synth", "--count", "60", "--seed", "1", "--sigma-model", "0.25,0.5,1,2", "--out-dir",
                    s + "/data"}) == 0,
           "synth failed");
  c.expect(run_cli({"quantify", "--dataset", s + "/data/dataset.json", "--out-dir", s + "/q"}) == 0, "quantify failed");
  c.expect(run_cli({"evaluate", "--input", s + "/q/quantified.json", "--whole-image", "--out", s + "/rep/run"}) == 0,
           "evaluate failed");
  if (!c.out.ok) return c.out;

  std::string summary;
  for (const auto& e : cli::correlation_table(read_report(dir / "rep/run.csv"))) {
    if (e.size_class) continue;
    const std::string label(to_string(e.method));
    c.expect(e.pcc.has_value(), label + ": PCC undefined (" + e.note + ")");
    if (!e.pcc) continue;
    c.expect(*e.pcc <= -0.5, label + ": PCC " + fmt(*e.pcc));
    summary += (summary.empty() ? "" : ", ") + label + " PCC " + fmt(*e.pcc) + " (n=" + std::to_string(e.n) + ")";
  }
  c.expect(!summary.empty(), "no correlation rows");
  if (c.out.ok) c.out.detail = summary;
  return c.out;
}

Outcome boundary_and_size_claims() {
  Checker c;
  std::size_t scenes = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto scene = generate_scene(random_scene_spec(7000 + s));
    const auto sd = signed_boundary_distance(scene.mask);
    for (double sigma : {0.25, 0.5, 1.0, 2.0}) {
      const MockPredictorSpec spec{sigma, 1.0, 1.0, 100 + s};
      const ProbVolume vols[] = {run_mc(spec, scene.image, scene.mask, 10),
                                 run_tta(spec, scene.image, scene.mask, 10, derive_seeds(300 + s, 10))};
      for (const auto& v : vols) {
        const auto e = entropy_map(aggregate_passes(v));
        double near = 0, far = 0;
        std::size_t nn = 0, nf = 0;
        for (std::size_t p = 0; p < sd.size(); ++p) {
          if (std::abs(sd[p]) <= 2.0) {
            near += e.data()[p];
            ++nn;
          } else {
            far += e.data()[p];
            ++nf;
          }
        }
        c.expect(nn > 0 && nf > 0 && near / nn > far / nf,
                 "scene " + std::to_string(s) + " sigma " + fmt(sigma) + ": near " + fmt(near / nn) + " far " + fmt(far / nf));
        ++scenes;
      }
    }
  }

  SceneOptions small_opts, large_opts;
  small_opts.min_radius_col = 4.0;
  small_opts.max_radius_col = 7.0;
  large_opts.min_radius_col = 12.0;
  large_opts.max_radius_col = 16.0;
  std::string sizes;
  for (double sigma : {0.5, 1.0, 2.0}) {
    double small_u = 0.0, large_u = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s) {
      const MockPredictorSpec spec{sigma, 1.0, 1.0, 900 + s};
      auto u_avg = [&](const Scene& sc) {
        const auto mean = aggregate_passes(run_mc(spec, sc.image, sc.mask, 10));
        return average_drusen_uncertainty(mean, entropy_map(mean)).u_avg;
      };
      small_u += u_avg(generate_scene(random_scene_spec(8000 + s, small_opts)));
      large_u += u_avg(generate_scene(random_scene_spec(8000 + s, large_opts)));
    }
    c.expect(small_u >= large_u, "sigma " + fmt(sigma) + ": small " + fmt(small_u / 20) + " < large " + fmt(large_u / 20));
    sizes += " " + fmt(small_u / 20) + ">=" + fmt(large_u / 20);
  }
  if (c.out.ok) c.out.detail = std::to_string(scenes) + " scene/pipeline pairs; U_avg small>=large:" + sizes;
  return c.out;
}

Outcome patching_exhaustive() {
  Checker c;
  std::size_t grids = 0;
  for (std::size_t window : {128, 192, 256}) {
    for (std::size_t stride : {std::size_t{64}, window}) {
      // Axis anchors, checked once per extent: in bounds, stride steps, snapped tail, full coverage.
      std::vector<std::vector<std::size_t>> anchors(301);
      for (std::size_t extent = window; extent <= 300; ++extent) {
        const auto a = axis_anchors(extent, window, stride);
        anchors[extent] = a;
        c.expect(!a.empty() && a.front() == 0 && a.back() == extent - window, "snap at extent " + std::to_string(extent));
        for (std::size_t i = 1; i < a.size(); ++i) {
          const bool step = a[i] == a[i - 1] + stride;
          const bool snapped = i + 1 == a.size() && a[i] > a[i - 1] && a[i] < a[i - 1] + stride;
          c.expect(step || snapped, "anchor spacing at extent " + std::to_string(extent));
        }
        std::vector<int> hits(extent, 0);
        for (auto x : a) {
          for (std::size_t i = x; i < x + window && i < extent; ++i) ++hits[i];
        }
        c.expect(std::all_of(hits.begin(), hits.end(), [](int v) { return v > 0; }),
                 "gap at extent " + std::to_string(extent));
      }
      for (std::size_t h = 1; h <= 300; ++h) {
        for (std::size_t w = 1; w <= 300; ++w) {
          if (h < window || w < window) {
            bool threw = false;
            try {
              plan_grid(h, w, window, stride);
            } catch (const Error& e) {
              threw = e.code() == ErrorCode::WindowTooLarge;
            }
            c.expect(threw, "no WindowTooLarge for " + std::to_string(h) + "x" + std::to_string(w));
            continue;
          }
          const auto grid = plan_grid(h, w, window, stride);
          const auto& ra = anchors[h];
          const auto& ca = anchors[w];
          bool same = grid.origins.size() == ra.size() * ca.size();
          for (std::size_t i = 0; same && i < ra.size(); ++i) {
            for (std::size_t j = 0; same && j < ca.size(); ++j) same = grid.origins[i * ca.size() + j] == PatchOrigin{ra[i], ca[j]};
          }
          c.expect(same, "grid " + std::to_string(h) + "x" + std::to_string(w) + " is not the anchor product");
          ++grids;
        }
      }
    }
  }

  // Stitching constant patches, and stitching crops of one map, both reproduce the source.
  std::mt19937_64 g(99);
  for (std::size_t window : {128, 192, 256}) {
    for (std::size_t stride : {std::size_t{64}, window}) {
      const std::size_t h = testing::pick(g, window, 300), w = testing::pick(g, window, 300);
      const auto grid = plan_grid(h, w, window, stride);
      std::vector<ProbMap> constant(grid.origins.size(),
                                    testing::binary_map(window, window, std::vector<double>(window * window, 0.3)));
      const auto flat = stitch(constant, grid);
      double worst = 0.0;
      for (std::size_t p = 0; p < h * w; ++p) worst = std::max(worst, std::abs(flat.at(p, 1) - 0.3));

      const auto source = testing::random_map(g, h, w, 3);
      std::vector<ProbMap> crops;
      for (const auto& o : grid.origins) crops.push_back(crop(source, o, window));
      const auto back = stitch(crops, grid);
      for (std::size_t i = 0; i < source.data().size(); ++i) worst = std::max(worst, std::abs(back.data()[i] - source.data()[i]));
      c.expect(worst <= 1e-12, "stitch identity error " + fmt(worst));
    }
  }
  if (c.out.ok) c.out.detail = std::to_string(grids) + " grids";
  return c.out;
}

Outcome determinism() {
  Checker c;
  testing::TempDir a("acc_det_a"), b("acc_det_b");
  for (const auto* dir : {&a, &b}) {
    const auto s = dir->path().string();
    c.expect(run_cli({"synth", "--count", "12", "--seed", "31337", "--sigma-model", "0.5,1,2", "--out-dir", s + "/data"}) == 0,
             "synth failed");
    c.expect(run_cli({"quantify", "--dataset", s + "/data/dataset.json", "--out-dir", s + "/q"}) == 0, "quantify failed");
    c.expect(run_cli({"evaluate", "--input", s + "/q/quantified.json", "--out", s + "/rep/run"}) == 0, "evaluate failed");
    c.expect(run_cli({"correlate", "--report", s + "/rep/run.csv", "--out", s + "/rep/corr"}) == 0, "correlate failed");
  }
  if (!c.out.ok) return c.out;
  std::size_t compared = 0;
  for (const auto& entry : fs::recursive_directory_iterator(a.path())) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), a.path());
    const auto twin = b.path() / rel;
    c.expect(fs::exists(twin) && slurp(entry.path()) == slurp(twin), rel.string() + " differs");
    ++compared;
  }
  c.expect(compared > 0, "no outputs");
  if (c.out.ok) c.out.detail = std::to_string(compared) + " files byte-identical";
  return c.out;
}

struct Criterion {
  const char* name;
  double limit_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {"entropy-exactness", 1, entropy_exactness},
      {"aggregation-oracle", 10, aggregation_oracle},
      {"transform-invertibility", 5, transform_invertibility},
      {"metrics-oracle", 1, metrics_oracle},
      {"thresholded-evaluation", 120, thresholded_claim},
      {"uncertainty-dice-correlation", 300, correlation_claim},
      {"boundary-and-size", 120, boundary_and_size_claims},
      {"patching", 30, patching_exhaustive},
      {"determinism", 300, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.limit_s) {
      o.ok = false;
      o.detail += (o.detail.empty() ? "" : "; ") + std::string("over the ") + fmt(c.limit_s) + " s limit";
    }
    failed += !o.ok;
    std::printf("%s %-30s %8.2fs  %s\n", o.ok ? "PASS" : "FAIL", c.name, secs, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
