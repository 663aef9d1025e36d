#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "segunc/evaluation.hpp"
#include "segunc/report.hpp"
#include "segunc/types.hpp"

namespace segunc::cli {

struct SynthOptions {
  std::size_t count = 10;
  std::uint64_t seed = 0;
  /// Cycled over the images: image i uses entry i % size.
  std::vector<double> sigma_models{1.0};
  std::vector<double> gains{1.0};
  std::size_t passes = 10;
  std::size_t size = 128;
  double softness = 1.0;
  double speckle = 0.15;
  double min_radius = 4.0;
  double max_radius = 16.0;
  std::filesystem::path out_dir;
};

/// Writes images, masks, plain/MC/TTA volumes, TTA manifests and dataset.json.
std::filesystem::path synth(const SynthOptions& o);

struct QuantifyOptions {
  // Single-volume mode.
  std::filesystem::path volume;
  std::filesystem::path manifest;
  std::filesystem::path out_prefix;
  std::string mode = "mc";
  // Dataset mode.
  std::filesystem::path dataset;
  std::filesystem::path out_dir;

  std::size_t passes = 10;
  LogBase base = LogBase::Bits;
};

/// Returns the quantified index path (dataset mode) or the summary path.
std::filesystem::path quantify(const QuantifyOptions& o);

struct EvaluateOptions {
  std::filesystem::path input;  // quantified.json
  // Single-map mode.
  std::filesystem::path mean;
  std::filesystem::path entropy;
  std::filesystem::path gt;
  std::string image_id = "image";
  std::string method = "epistemic";
  LogBase base = LogBase::Bits;

  double exclude_fraction = 0.025;
  std::optional<double> abs_threshold;
  std::optional<SizeThresholds> size_thresholds;
  std::size_t window = 128;
  std::size_t stride = 0;  // 0: same as window
  bool whole_image = false;
  bool global_cutoff = false;
  std::filesystem::path out;  // report prefix
};

RunReport evaluate(const EvaluateOptions& o);

struct CorrelationEntry {
  Method method;
  std::optional<SizeClass> size_class;  // nullopt: all classes
  std::size_t n = 0;
  std::optional<double> pcc;
  std::string note;
};

struct CorrelateOptions {
  std::filesystem::path report;
  std::filesystem::path out;  // prefix: <out>.json and <out>_scatter.csv
};

std::vector<CorrelationEntry> correlate(const CorrelateOptions& o);
/// PCC(U_avg, dice) per uncertainty method and size class over image rows.
std::vector<CorrelationEntry> correlation_table(const RunReport& report);

struct RenderOptions {
  std::filesystem::path input;  // quantified.json
  std::filesystem::path image;
  std::filesystem::path gt;
  std::filesystem::path mean;
  std::filesystem::path entropy;
  std::string id = "image";
  LogBase base = LogBase::Bits;
  std::filesystem::path out_dir;
};

std::vector<std::filesystem::path> render(const RenderOptions& o);

/// Full command line including the program name.
int run(int argc, const char* const* argv);
/// Arguments without the program name.
int run(const std::vector<std::string>& args);

}  // namespace segunc::cli
