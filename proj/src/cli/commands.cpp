#include "cli/commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>

#include "cli/dataset.hpp"
#include "segunc/image_io.hpp"
#include "segunc/manifest.hpp"
#include "segunc/npy.hpp"
#include "segunc/patching.hpp"
#include "segunc/render.hpp"
#include "segunc/rng.hpp"
#include "segunc/synthetic.hpp"
#include "segunc/uncertainty.hpp"

namespace segunc::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string image_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "scene_%03zu", i);
  return buf;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::IoFailure, "cannot create directory " + dir.string() + ": " + ec.message());
}

fs::path with_suffix(const fs::path& prefix, const std::string& suffix) {
  auto p = prefix;
  p += suffix;
  return p;
}

}  // namespace

// ---------------------------------------------------------------------------
// synth

fs::path synth(const SynthOptions& o) {
  if (o.count == 0) fail(ErrorCode::InvalidArgument, "--count must be positive");
  if (o.passes == 0) fail(ErrorCode::InvalidArgument, "--passes must be positive");
  if (o.sigma_models.empty() || o.gains.empty()) fail(ErrorCode::InvalidArgument, "noise lists must not be empty");
  ensure_dir(o.out_dir);

  SceneOptions scene_opts;
  scene_opts.height = o.size;
  scene_opts.width = o.size;
  scene_opts.speckle_sigma = o.speckle;
  scene_opts.min_radius_col = o.min_radius;
  scene_opts.max_radius_col = o.max_radius;

  const fs::path index_path = o.out_dir / "dataset.json";
  DatasetIndex index;
  index.passes = o.passes;
  for (std::size_t i = 0; i < o.count; ++i) {
    const std::string id = image_name(i);
    const auto scene = generate_scene(random_scene_spec(counter_hash(o.seed, 1, i), scene_opts));

    MockPredictorSpec pred;
    pred.sigma_model = o.sigma_models[i % o.sigma_models.size()];
    pred.gain = o.gains[i % o.gains.size()];
    pred.softness = o.softness;
    pred.seed = counter_hash(o.seed, 2, i);

    const auto mc = run_mc(pred, scene.image, scene.mask, o.passes);
    const auto seeds = derive_seeds(counter_hash(o.seed, 3, i), o.passes);
    const auto tta = run_tta(pred, scene.image, scene.mask, o.passes, seeds);
    // A single extra stochastic pass stands in for a network run once.
    const ProbVolume plain({mock_predict(pred, scene.image, scene.mask, o.passes)}, Provenance::External);

    DatasetItem item;
    item.image_id = id;
    item.image = id + "_image.pgm";
    item.mask = id + "_mask.png";
    item.plain = id + "_plain.npy";
    item.mc = id + "_mc.npy";
    item.tta = id + "_tta.npy";
    item.tta_manifest = id + "_tta.json";
    write_pgm(o.out_dir / item.image, scene.image, 16);
    write_mask(o.out_dir / item.mask, scene.mask);
    write_volume(o.out_dir / item.plain, plain);
    write_volume(o.out_dir / item.mc, mc);
    write_volume(o.out_dir / item.tta, tta);
    write_manifest(o.out_dir / item.tta_manifest, TtaManifest{id, {tta.transforms().begin(), tta.transforms().end()}});
    index.items.push_back(std::move(item));
  }
  write_dataset_index(index_path, index);
  return index_path;
}

// ---------------------------------------------------------------------------
// quantify

namespace {

struct Quantified {
  ProbMap mean;
  EntropyMap entropy;
  DrusenUncertainty u;
  std::size_t passes = 0;
  Provenance provenance = Provenance::External;
};

Quantified quantify_volume(const fs::path& volume, const fs::path& manifest, AggregationMode mode,
                           std::optional<std::size_t> expected_passes, LogBase base) {
  std::vector<TransformRecord> transforms;
  Provenance provenance = mode == AggregationMode::McDropout ? Provenance::McDropout : Provenance::External;
  if (!manifest.empty()) {
    if (mode != AggregationMode::Tta) fail(ErrorCode::InvalidArgument, "a manifest only applies to --mode tta");
    transforms = read_manifest(manifest).transforms;
    provenance = Provenance::Tta;
  }
  const auto vol = read_volume(volume, DtypePolicy::Strict, provenance, std::move(transforms));
  if (expected_passes && vol.passes() != *expected_passes) {
    fail(ErrorCode::CountMismatch, volume.string() + " holds " + std::to_string(vol.passes()) + " passes, expected " +
                                       std::to_string(*expected_passes));
  }
  Quantified q;
  q.mean = aggregate_passes(vol);
  q.entropy = entropy_map(q.mean, base);
  q.u = average_drusen_uncertainty(q.mean, q.entropy);
  q.passes = vol.passes();
  q.provenance = vol.provenance();
  return q;
}

void write_quantified(const fs::path& prefix, const Quantified& q) {
  write_prob_map(with_suffix(prefix, "_mean.npy"), q.mean);
  write_entropy(with_suffix(prefix, "_entropy.npy"), q.entropy);
}

AggregationMode parse_mode(const std::string& s) {
  if (s == "mc") return AggregationMode::McDropout;
  if (s == "tta") return AggregationMode::Tta;
  fail(ErrorCode::InvalidArgument, "--mode must be mc or tta");
}

}  // namespace

fs::path quantify(const QuantifyOptions& o) {
  if (o.passes == 0) fail(ErrorCode::InvalidArgument, "--passes must be positive");
  if (!o.dataset.empty()) {
    const auto index = read_dataset_index(o.dataset);
    ensure_dir(o.out_dir);
    const fs::path out_index = o.out_dir / "quantified.json";
    QuantifiedIndex qi;
    qi.base = o.base;
    for (const auto& item : index.items) {
      QuantifiedItem qitem;
      qitem.image_id = item.image_id;
      if (!item.image.empty()) qitem.image = relative_to(out_index, resolve(o.dataset, item.image));
      qitem.mask = relative_to(out_index, resolve(o.dataset, item.mask));
      struct Source {
        Method method;
        const std::string* volume;
        const char* label;
        AggregationMode mode;
      };
      const Source sources[] = {{Method::NoUncertainty, &item.plain, "plain", AggregationMode::McDropout},
                                {Method::Epistemic, &item.mc, "mc", AggregationMode::McDropout},
                                {Method::Aleatoric, &item.tta, "tta", AggregationMode::Tta}};
      for (const auto& src : sources) {
        if (src.volume->empty()) continue;
        const fs::path manifest =
            src.method == Method::Aleatoric && !item.tta_manifest.empty() ? resolve(o.dataset, item.tta_manifest) : "";
        std::optional<std::size_t> expected;
        if (src.method != Method::NoUncertainty) expected = o.passes;
        const auto q = quantify_volume(resolve(o.dataset, *src.volume), manifest, src.mode, expected, o.base);
        const fs::path prefix = o.out_dir / (item.image_id + "_" + src.label);
        write_quantified(prefix, q);
        qitem.methods[src.method] = {relative_to(out_index, with_suffix(prefix, "_mean.npy")),
                                     relative_to(out_index, with_suffix(prefix, "_entropy.npy")), q.passes, q.u.u_avg,
                                     q.u.pixels};
      }
      qi.items.push_back(std::move(qitem));
    }
    write_quantified_index(out_index, qi);
    return out_index;
  }

  if (o.volume.empty() || o.out_prefix.empty()) {
    fail(ErrorCode::InvalidArgument, "quantify needs --volume and --out-prefix, or --dataset and --out-dir");
  }
  const auto q = quantify_volume(o.volume, o.manifest, parse_mode(o.mode), o.passes, o.base);
  if (!o.out_prefix.parent_path().empty()) ensure_dir(o.out_prefix.parent_path());
  write_quantified(o.out_prefix, q);
  json summary{{"mode", o.mode},
               {"provenance", std::string(to_string(q.provenance))},
               {"passes", q.passes},
               {"classes", q.mean.classes()},
               {"log_base", std::string(log_base_label(o.base))},
               {"u_avg", q.u.u_avg},
               {"u_avg_pixels", q.u.pixels},
               {"empty_selection", q.u.empty_selection}};
  const auto summary_path = with_suffix(o.out_prefix, "_summary.json");
  write_text(summary_path, summary.dump(2) + "\n");
  return summary_path;
}

// ---------------------------------------------------------------------------
// evaluate

namespace {

struct LoadedMethod {
  ProbMap mean;
  EntropyMap entropy;
  std::size_t passes = 0;
};

struct LoadedItem {
  std::string image_id;
  BinaryMask gt;
  std::map<Method, LoadedMethod> methods;
};

struct Unit {
  std::string id;
  std::size_t item = 0;
  PatchOrigin origin;
  std::size_t window = 0;  // 0: whole image
  BinaryMask gt;
};

template <typename T>
T cut(const T& full, const Unit& u) {
  return u.window == 0 ? full : crop(full, u.origin, u.window);
}

void print_table(const std::vector<ReportRow>& aggregates, std::ostream& out) {
  out << "method                    size    n    dice  precision  recall  excluded\n";
  for (const auto& r : aggregates) {
    char line[160];
    auto cell = [](const std::optional<double>& v) { return v ? *v : -1.0; };
    std::snprintf(line, sizeof line, "%-24s  %-6s %4zu  %6.3f  %9.3f  %6.3f  %8.4f\n",
                  std::string(to_string(r.method)).c_str(),
                  r.size_class ? std::string(to_string(*r.size_class)).c_str() : "all", r.count, r.dice,
                  cell(r.precision), cell(r.recall), r.excluded_fraction);
    out << line;
  }
}

}  // namespace

RunReport evaluate(const EvaluateOptions& o) {
  fs::path index_path = o.input;
  QuantifiedIndex qi;
  if (!index_path.empty()) {
    qi = read_quantified_index(index_path);
  } else {
    if (o.mean.empty() || o.entropy.empty() || o.gt.empty()) {
      fail(ErrorCode::InvalidArgument, "evaluate needs --input, or --mean, --entropy and --gt");
    }
    const auto m = parse_method(o.method);
    if (!m || *m == Method::EpistemicThresholded || *m == Method::AleatoricThresholded) {
      fail(ErrorCode::InvalidArgument, "--method must be no-uncertainty, epistemic or aleatoric");
    }
    qi.base = o.base;
    QuantifiedItem item;
    item.image_id = o.image_id;
    item.mask = fs::absolute(o.gt).string();
    item.methods[*m] = {fs::absolute(o.mean).string(), fs::absolute(o.entropy).string(), 0, 0.0, 0};
    qi.items.push_back(std::move(item));
  }

  std::vector<LoadedItem> items;
  for (const auto& qitem : qi.items) {
    LoadedItem li;
    li.image_id = qitem.image_id;
    li.gt = read_mask(resolve(index_path, qitem.mask));
    for (const auto& [m, q] : qitem.methods) {
      auto mean = read_prob_map(resolve(index_path, q.mean));
      auto ent = read_entropy(resolve(index_path, q.entropy), mean.classes(), qi.base);
      require_same_shape(li.gt.shape(), mean.shape(), qitem.image_id + " mean map vs mask");
      require_same_shape(li.gt.shape(), ent.shape(), qitem.image_id + " entropy map vs mask");
      li.methods[m] = {std::move(mean), std::move(ent), q.passes};
    }
    items.push_back(std::move(li));
  }

  std::vector<Unit> units;
  std::size_t skipped = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& gt = items[i].gt;
    std::vector<Unit> candidates;
    if (o.whole_image) {
      candidates.push_back({items[i].image_id, i, {0, 0}, 0, gt});
    } else {
      const std::size_t stride = o.stride == 0 ? o.window : o.stride;
      const auto grid = plan_grid(gt.height(), gt.width(), o.window, stride);
      for (const auto& origin : grid.origins) {
        std::string id = items[i].image_id;
        if (grid.origins.size() > 1) id += "@" + std::to_string(origin.row) + "_" + std::to_string(origin.col);
        candidates.push_back({id, i, origin, o.window, crop(gt, origin, o.window)});
      }
    }
    for (auto& u : candidates) {
      if (u.gt.count() == 0) {
        ++skipped;
        continue;
      }
      units.push_back(std::move(u));
    }
  }
  if (skipped > 0) std::cerr << "segunc: skipped " << skipped << " unit(s) without drusen in the ground truth\n";
  if (units.empty()) fail(ErrorCode::InvalidArgument, "no unit with drusen to evaluate");

  SizeThresholds thresholds;
  if (o.size_thresholds) {
    thresholds = *o.size_thresholds;
  } else {
    std::vector<std::size_t> counts;
    for (const auto& u : units) counts.push_back(u.gt.count());
    if (counts.size() < 3) {
      fail(ErrorCode::InvalidArgument, "fewer than 3 units: pass --size-thresholds explicitly");
    }
    thresholds = tertile_thresholds(counts);
  }

  const ThresholdPolicy policy = o.abs_threshold ? ThresholdPolicy::absolute(*o.abs_threshold)
                                                 : ThresholdPolicy::exclude_fraction(o.exclude_fraction);
  std::map<Method, double> global;
  if (o.global_cutoff) {
    std::map<Method, std::vector<double>> pooled;
    for (const auto& u : units) {
      for (const auto& [m, lm] : items[u.item].methods) {
        const auto e = cut(lm.entropy, u);
        pooled[m].insert(pooled[m].end(), e.data().begin(), e.data().end());
      }
    }
    for (const auto& [m, values] : pooled) global[m] = entropy_cutoff(policy, values);
  }

  RunReport report;
  for (const auto& u : units) {
    const auto size = size_class_of_count(u.gt.count(), thresholds);
    for (const auto& [m, lm] : items[u.item].methods) {
      const auto mean = cut(lm.mean, u);
      const auto ent = cut(lm.entropy, u);
      auto eval = o.global_cutoff ? thresholded_eval_at(mean, ent, u.gt, global.at(m))
                                  : thresholded_eval(mean, ent, u.gt, policy);
      eval.size_class = size;
      if (lm.passes) eval.pass_count = lm.passes;
      for (auto& row : rows_from_eval(u.id, size, m, eval)) report.rows.push_back(std::move(row));
    }
  }
  const auto aggregates = aggregate(report.rows);
  report.rows.insert(report.rows.end(), aggregates.begin(), aggregates.end());
  if (!o.out.empty()) {
    if (!o.out.parent_path().empty()) ensure_dir(o.out.parent_path());
    write_report(o.out, report);
  }
  return report;
}

// ---------------------------------------------------------------------------
// correlate

std::vector<CorrelationEntry> correlation_table(const RunReport& report) {
  std::vector<CorrelationEntry> out;
  const std::optional<SizeClass> classes[] = {std::nullopt, SizeClass::Large, SizeClass::Medium, SizeClass::Small};
  for (auto method : {Method::Epistemic, Method::Aleatoric}) {
    for (const auto& cls : classes) {
      std::vector<double> u, dice;
      for (const auto& r : report.rows) {
        if (r.scope != RowScope::Image || r.method != method || r.u_avg_pixels == 0) continue;
        if (cls && r.size_class != cls) continue;
        u.push_back(r.u_avg);
        dice.push_back(r.dice);
      }
      CorrelationEntry e{method, cls, u.size(), std::nullopt, ""};
      if (u.size() < 2) {
        e.note = "fewer than 2 images";
      } else {
        try {
          e.pcc = pearson(u, dice);
        } catch (const Error& err) {
          e.note = std::string(to_string(err.code()));
        }
      }
      out.push_back(std::move(e));
    }
  }
  return out;
}

std::vector<CorrelationEntry> correlate(const CorrelateOptions& o) {
  const auto report = read_report(o.report);
  auto table = correlation_table(report);
  if (!o.out.empty()) {
    if (!o.out.parent_path().empty()) ensure_dir(o.out.parent_path());
    json entries = json::array();
    for (const auto& e : table) {
      entries.push_back({{"method", std::string(to_string(e.method))},
                         {"size_class", e.size_class ? std::string(to_string(*e.size_class)) : "all"},
                         {"n", e.n},
                         {"pcc", e.pcc ? json(*e.pcc) : json(nullptr)},
                         {"note", e.note}});
    }
    write_text(with_suffix(o.out, ".json"), json{{"schema_version", 1}, {"correlations", entries}}.dump(2) + "\n");

    std::ostringstream scatter;
    scatter << "method,size_class,image_id,u_avg,dice\n";
    for (const auto& r : report.rows) {
      if (r.scope != RowScope::Image || r.u_avg_pixels == 0) continue;
      if (r.method != Method::Epistemic && r.method != Method::Aleatoric) continue;
      scatter << to_string(r.method) << ',' << (r.size_class ? to_string(*r.size_class) : "all") << ',' << r.image_id
              << ',' << format_number(r.u_avg) << ',' << format_number(r.dice) << "\n";
    }
    write_text(with_suffix(o.out, "_scatter.csv"), scatter.str());
  }
  return table;
}

// ---------------------------------------------------------------------------
// render

std::vector<fs::path> render(const RenderOptions& o) {
  ensure_dir(o.out_dir);
  std::vector<fs::path> written;
  auto emit = [&](const GrayImage& img, const BinaryMask& gt, const ProbMap& mean, const EntropyMap& ent,
                  const std::string& stem) {
    const auto overlay = o.out_dir / (stem + "_overlay.png");
    const auto heatmap = o.out_dir / (stem + "_heatmap.png");
    render_overlay(img, gt, binarize(mean), overlay);
    render_heatmap(ent, heatmap);
    written.push_back(overlay);
    written.push_back(heatmap);
  };
  if (!o.input.empty()) {
    const auto qi = read_quantified_index(o.input);
    for (const auto& item : qi.items) {
      if (item.image.empty()) fail(ErrorCode::InvalidArgument, item.image_id + ": no image path in the index");
      const auto img = read_image(resolve(o.input, item.image));
      const auto gt = read_mask(resolve(o.input, item.mask));
      for (const auto& [m, q] : item.methods) {
        const auto mean = read_prob_map(resolve(o.input, q.mean));
        const auto ent = read_entropy(resolve(o.input, q.entropy), mean.classes(), qi.base);
        emit(img, gt, mean, ent, item.image_id + "_" + std::string(to_string(m)));
      }
    }
    return written;
  }
  if (o.image.empty() || o.gt.empty() || o.mean.empty() || o.entropy.empty()) {
    fail(ErrorCode::InvalidArgument, "render needs --input, or --image, --gt, --mean and --entropy");
  }
  const auto mean = read_prob_map(o.mean);
  emit(read_image(o.image), read_mask(o.gt), mean, read_entropy(o.entropy, mean.classes(), o.base), o.id);
  return written;
}

// ---------------------------------------------------------------------------
// command line

namespace {

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      fail(ErrorCode::InvalidArgument, "bad number '" + tok + "' in list '" + s + "'");
    }
  }
  return out;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Uncertainty quantification and uncertainty-aware evaluation for drusen segmentation"};
  app.require_subcommand(1);

  SynthOptions so;
  std::string sigma_list = "1", gain_list = "1";
  auto* synth_cmd = app.add_subcommand("synth", "Generate synthetic scenes, masks and prediction volumes");
  synth_cmd->add_option("--count", so.count, "Number of images")->capture_default_str();
  synth_cmd->add_option("--seed", so.seed, "Base RNG seed")->capture_default_str();
  synth_cmd->add_option("--sigma-model", sigma_list, "Per-pass logit noise; comma list cycles over images")
      ->capture_default_str();
  synth_cmd->add_option("--gain", gain_list, "Input-perturbation gain; comma list cycles over images")
      ->capture_default_str();
  synth_cmd->add_option("--passes", so.passes, "Passes T per volume")->capture_default_str();
  synth_cmd->add_option("--size", so.size, "Image height and width")->capture_default_str();
  synth_cmd->add_option("--softness", so.softness, "Boundary softness s (pixels per logit)")->capture_default_str();
  synth_cmd->add_option("--speckle", so.speckle, "Multiplicative speckle sigma")->capture_default_str();
  synth_cmd->add_option("--min-radius", so.min_radius, "Smallest lesion half-width")->capture_default_str();
  synth_cmd->add_option("--max-radius", so.max_radius, "Largest lesion half-width")->capture_default_str();
  synth_cmd->add_option("--out-dir", so.out_dir, "Output directory")->required();

  QuantifyOptions qo;
  std::string q_base = "2";
  auto* quant_cmd = app.add_subcommand("quantify", "Mean map, entropy map and U_avg from a pass volume");
  quant_cmd->add_option("--volume", qo.volume, "[T,C,H,W] float32 NPY volume");
  quant_cmd->add_option("--manifest", qo.manifest, "TTA manifest matching the volume");
  quant_cmd->add_option("--out-prefix", qo.out_prefix, "Writes <prefix>_mean.npy, _entropy.npy, _summary.json");
  quant_cmd->add_option("--dataset", qo.dataset, "dataset.json from synth (batch mode)");
  quant_cmd->add_option("--out-dir", qo.out_dir, "Output directory in batch mode");
  quant_cmd->add_option("--mode", qo.mode, "Aggregation mode")->check(CLI::IsMember({"mc", "tta"}))->capture_default_str();
  quant_cmd->add_option("--passes", qo.passes, "Expected pass count T")->capture_default_str();
  quant_cmd->add_option("--log-base", q_base, "Entropy log base")->check(CLI::IsMember({"2", "e"}))->capture_default_str();

  EvaluateOptions eo;
  std::string e_base = "2", size_thresholds;
  double abs_threshold = -1.0;
  auto* eval_cmd = app.add_subcommand("evaluate", "Plain and uncertainty-thresholded dice/precision/recall");
  eval_cmd->add_option("--input", eo.input, "quantified.json from quantify");
  eval_cmd->add_option("--mean", eo.mean, "[C,H,W] mean map (single-map mode)");
  eval_cmd->add_option("--entropy", eo.entropy, "[H,W] entropy map (single-map mode)");
  eval_cmd->add_option("--gt", eo.gt, "Ground-truth mask PNG (single-map mode)");
  eval_cmd->add_option("--image-id", eo.image_id, "Image id (single-map mode)")->capture_default_str();
  eval_cmd->add_option("--method", eo.method, "Method label (single-map mode)")->capture_default_str();
  eval_cmd->add_option("--log-base", e_base, "Entropy log base (single-map mode)")
      ->check(CLI::IsMember({"2", "e"}))
      ->capture_default_str();
  eval_cmd->add_option("--exclude-fraction", eo.exclude_fraction, "Fraction of most uncertain pixels to exclude")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  eval_cmd->add_option("--abs-threshold", abs_threshold, "Absolute entropy cutoff; overrides --exclude-fraction");
  eval_cmd->add_option("--size-thresholds", size_thresholds, "t1,t2 drusen-pixel boundaries (default: tertiles)");
  eval_cmd->add_option("--window", eo.window, "Patch window")->check(CLI::IsMember({128, 192, 256}))->capture_default_str();
  eval_cmd->add_option("--stride", eo.stride, "Patch stride (default: window)");
  eval_cmd->add_flag("--whole-image", eo.whole_image, "Score whole images instead of patches");
  eval_cmd->add_flag("--global-cutoff", eo.global_cutoff, "One entropy cutoff over the whole dataset per method");
  eval_cmd->add_option("--out", eo.out, "Report prefix: writes <out>.csv and <out>.json")->required();

  CorrelateOptions co;
  auto* corr_cmd = app.add_subcommand("correlate", "Pearson correlation of U_avg and dice per size class");
  corr_cmd->add_option("--report", co.report, "Report CSV or JSON from evaluate")->required();
  corr_cmd->add_option("--out", co.out, "Writes <out>.json and <out>_scatter.csv")->required();

  RenderOptions ro;
  std::string r_base = "2";
  auto* render_cmd = app.add_subcommand("render", "Segmentation overlays and entropy heatmaps");
  render_cmd->add_option("--input", ro.input, "quantified.json from quantify (batch mode)");
  render_cmd->add_option("--image", ro.image, "Gray image (.pgm/.png)");
  render_cmd->add_option("--gt", ro.gt, "Ground-truth mask");
  render_cmd->add_option("--mean", ro.mean, "[C,H,W] mean map");
  render_cmd->add_option("--entropy", ro.entropy, "[H,W] entropy map");
  render_cmd->add_option("--id", ro.id, "Output file stem")->capture_default_str();
  render_cmd->add_option("--log-base", r_base, "Entropy log base")->check(CLI::IsMember({"2", "e"}))->capture_default_str();
  render_cmd->add_option("--out-dir", ro.out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*synth_cmd) {
      so.sigma_models = parse_list(sigma_list);
      so.gains = parse_list(gain_list);
      std::cout << synth(so).string() << "\n";
    } else if (*quant_cmd) {
      qo.base = parse_log_base(q_base);
      std::cout << quantify(qo).string() << "\n";
    } else if (*eval_cmd) {
      eo.base = parse_log_base(e_base);
      if (abs_threshold >= 0.0) eo.abs_threshold = abs_threshold;
      if (!size_thresholds.empty()) {
        const auto t = parse_list(size_thresholds);
        if (t.size() != 2 || t[0] < 0 || t[1] < 0) fail(ErrorCode::InvalidArgument, "--size-thresholds takes t1,t2");
        eo.size_thresholds = SizeThresholds(static_cast<std::size_t>(t[0]), static_cast<std::size_t>(t[1]));
      }
      const auto report = evaluate(eo);
      print_table(report.aggregate_rows(), std::cout);
    } else if (*corr_cmd) {
      for (const auto& e : correlate(co)) {
        std::cout << to_string(e.method) << ' ' << (e.size_class ? to_string(*e.size_class) : "all") << " n=" << e.n
                  << " pcc=" << (e.pcc ? format_number(*e.pcc) : "nan (" + e.note + ")") << "\n";
      }
    } else if (*render_cmd) {
      ro.base = parse_log_base(r_base);
      for (const auto& p : render(ro)) std::cout << p.string() << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "segunc: error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "segunc: error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"segunc"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace segunc::cli
