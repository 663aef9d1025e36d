#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "segunc/types.hpp"

namespace segunc {

/// Evaluation methods; labels are the row names of the results table.
enum class Method { NoUncertainty, Epistemic, Aleatoric, EpistemicThresholded, AleatoricThresholded };

constexpr Method kAllMethods[] = {Method::NoUncertainty, Method::Epistemic, Method::Aleatoric,
                                  Method::EpistemicThresholded, Method::AleatoricThresholded};

std::string_view to_string(Method m);
std::optional<Method> parse_method(std::string_view s);
/// Epistemic -> EpistemicThresholded, Aleatoric -> AleatoricThresholded.
std::optional<Method> thresholded_variant(Method m);

enum class RowScope { Image, Aggregate };

struct ReportRow {
  RowScope scope = RowScope::Image;
  std::string image_id;
  std::optional<SizeClass> size_class;  // aggregate rows over every class carry nullopt ("all")
  Method method = Method::NoUncertainty;
  double dice = 0.0;
  std::optional<double> precision;
  std::optional<double> recall;
  bool degenerate = false;
  double u_avg = 0.0;
  std::size_t u_avg_pixels = 0;
  double excluded_fraction = 0.0;
  std::size_t count = 1;  // units averaged into this row

  bool operator==(const ReportRow&) const = default;
};

struct RunReport {
  std::vector<ReportRow> rows;

  std::vector<ReportRow> image_rows() const;
  std::vector<ReportRow> aggregate_rows() const;
};

/// One row for `method`; for Epistemic/Aleatoric a second row carries the
/// thresholded metrics under the thresholded label.
std::vector<ReportRow> rows_from_eval(const std::string& image_id, std::optional<SizeClass> size, Method method,
                                      const EvalReport& eval);

/// Per method x size class means, then per method over all classes. Ratios
/// left undefined on an image are skipped in the mean.
std::vector<ReportRow> aggregate(std::span<const ReportRow> image_rows);

std::string report_to_csv(const RunReport& r);
RunReport report_from_csv(const std::string& text);
std::string report_to_json(const RunReport& r);
RunReport report_from_json(const std::string& text);

/// Writes `<prefix>.csv` and `<prefix>.json`.
void write_report(const std::filesystem::path& prefix, const RunReport& r);
/// Reads CSV or JSON by extension.
RunReport read_report(const std::filesystem::path& path);

/// Shortest round-trip decimal for a double (%.17g).
std::string format_number(double v);

}  // namespace segunc
