#include "segunc/report.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace segunc {

using nlohmann::json;

std::string_view to_string(Method m) {
  switch (m) {
    case Method::NoUncertainty: return "no-uncertainty";
    case Method::Epistemic: return "epistemic";
    case Method::Aleatoric: return "aleatoric";
    case Method::EpistemicThresholded: return "epistemic-thresholded";
    case Method::AleatoricThresholded: return "aleatoric-thresholded";
  }
  return "no-uncertainty";
}

std::optional<Method> parse_method(std::string_view s) {
  for (auto m : kAllMethods) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

std::optional<Method> thresholded_variant(Method m) {
  if (m == Method::Epistemic) return Method::EpistemicThresholded;
  if (m == Method::Aleatoric) return Method::AleatoricThresholded;
  return std::nullopt;
}

std::vector<ReportRow> RunReport::image_rows() const {
  std::vector<ReportRow> out;
  for (const auto& r : rows) {
    if (r.scope == RowScope::Image) out.push_back(r);
  }
  return out;
}

std::vector<ReportRow> RunReport::aggregate_rows() const {
  std::vector<ReportRow> out;
  for (const auto& r : rows) {
    if (r.scope == RowScope::Aggregate) out.push_back(r);
  }
  return out;
}

std::vector<ReportRow> rows_from_eval(const std::string& image_id, std::optional<SizeClass> size, Method method,
                                      const EvalReport& eval) {
  auto make = [&](Method m, const Metrics& metrics, double excluded) {
    ReportRow row;
    row.image_id = image_id;
    row.size_class = size;
    row.method = m;
    row.dice = metrics.dice;
    row.precision = metrics.precision;
    row.recall = metrics.recall;
    row.degenerate = metrics.degenerate;
    row.u_avg = eval.u_avg;
    row.u_avg_pixels = eval.u_avg_pixels;
    row.excluded_fraction = excluded;
    return row;
  };
  std::vector<ReportRow> rows{make(method, eval.plain, 0.0)};
  if (auto thr = thresholded_variant(method)) rows.push_back(make(*thr, eval.thresholded, eval.excluded_fraction));
  return rows;
}

namespace {

struct Accumulator {
  double dice = 0.0, u_avg = 0.0, excluded = 0.0, precision = 0.0, recall = 0.0;
  std::size_t n = 0, n_precision = 0, n_recall = 0, u_avg_pixels = 0;

  void add(const ReportRow& r) {
    dice += r.dice;
    u_avg += r.u_avg;
    excluded += r.excluded_fraction;
    u_avg_pixels += r.u_avg_pixels;
    if (r.precision) {
      precision += *r.precision;
      ++n_precision;
    }
    if (r.recall) {
      recall += *r.recall;
      ++n_recall;
    }
    ++n;
  }

  ReportRow row(Method m, std::optional<SizeClass> size) const {
    ReportRow out;
    out.scope = RowScope::Aggregate;
    out.image_id = "*";
    out.size_class = size;
    out.method = m;
    const double dn = static_cast<double>(n);
    out.dice = dice / dn;
    if (n_precision) out.precision = precision / static_cast<double>(n_precision);
    if (n_recall) out.recall = recall / static_cast<double>(n_recall);
    out.u_avg = u_avg / dn;
    out.u_avg_pixels = u_avg_pixels;
    out.excluded_fraction = excluded / dn;
    out.count = n;
    return out;
  }
};

int size_rank(std::optional<SizeClass> s) { return s ? static_cast<int>(*s) : 3; }

}  // namespace

std::vector<ReportRow> aggregate(std::span<const ReportRow> image_rows) {
  std::map<std::pair<int, int>, Accumulator> groups;
  for (const auto& r : image_rows) {
    if (r.scope != RowScope::Image) continue;
    const int m = static_cast<int>(r.method);
    if (r.size_class) groups[{m, size_rank(r.size_class)}].add(r);
    groups[{m, 3}].add(r);
  }
  std::vector<ReportRow> out;
  for (const auto& [key, acc] : groups) {
    const auto size = key.second == 3 ? std::nullopt : std::optional<SizeClass>(static_cast<SizeClass>(key.second));
    out.push_back(acc.row(static_cast<Method>(key.first), size));
  }
  return out;
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

constexpr const char* kCsvHeader =
    "scope,image_id,size_class,method,dice,precision,recall,degenerate,u_avg,u_avg_pixels,excluded_fraction,count";

std::string size_label(std::optional<SizeClass> s) { return s ? std::string(to_string(*s)) : "all"; }

std::optional<SizeClass> parse_size_label(const std::string& s) {
  if (s == "all" || s.empty()) return std::nullopt;
  auto c = parse_size_class(s);
  if (!c) fail(ErrorCode::MalformedHeader, "unknown size class '" + s + "'");
  return c;
}

Method require_method(const std::string& s) {
  auto m = parse_method(s);
  if (!m) fail(ErrorCode::MalformedHeader, "unknown method '" + s + "'");
  return *m;
}

RowScope parse_scope(const std::string& s) {
  if (s == "image") return RowScope::Image;
  if (s == "aggregate") return RowScope::Aggregate;
  fail(ErrorCode::MalformedHeader, "unknown row scope '" + s + "'");
}

std::string_view scope_label(RowScope s) { return s == RowScope::Image ? "image" : "aggregate"; }

double parse_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(ErrorCode::MalformedHeader, "bad number '" + s + "'");
  }
}

std::size_t parse_count(const std::string& s) {
  try {
    return static_cast<std::size_t>(std::stoull(s));
  } catch (const std::exception&) {
    fail(ErrorCode::MalformedHeader, "bad count '" + s + "'");
  }
}

std::optional<double> parse_optional(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return parse_double(s);
}

std::string optional_cell(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

}  // namespace

std::string report_to_csv(const RunReport& r) {
  std::ostringstream out;
  out << kCsvHeader << "\n";
  for (const auto& row : r.rows) {
    if (row.image_id.find_first_of(",\"\n\r") != std::string::npos) {
      fail(ErrorCode::InvalidArgument, "image id '" + row.image_id + "' contains CSV metacharacters");
    }
    out << scope_label(row.scope) << ',' << row.image_id << ',' << size_label(row.size_class) << ','
        << to_string(row.method) << ',' << format_number(row.dice) << ',' << optional_cell(row.precision) << ','
        << optional_cell(row.recall) << ',' << (row.degenerate ? 1 : 0) << ',' << format_number(row.u_avg) << ','
        << row.u_avg_pixels << ',' << format_number(row.excluded_fraction) << ',' << row.count << "\n";
  }
  return out.str();
}

RunReport report_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) fail(ErrorCode::MalformedHeader, "unexpected report CSV header");
  RunReport r;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() != 12) fail(ErrorCode::MalformedHeader, "report row has " + std::to_string(cells.size()) + " cells");
    ReportRow row;
    row.scope = parse_scope(cells[0]);
    row.image_id = cells[1];
    row.size_class = parse_size_label(cells[2]);
    row.method = require_method(cells[3]);
    row.dice = parse_double(cells[4]);
    row.precision = parse_optional(cells[5]);
    row.recall = parse_optional(cells[6]);
    row.degenerate = cells[7] == "1";
    row.u_avg = parse_double(cells[8]);
    row.u_avg_pixels = parse_count(cells[9]);
    row.excluded_fraction = parse_double(cells[10]);
    row.count = parse_count(cells[11]);
    r.rows.push_back(std::move(row));
  }
  return r;
}

std::string report_to_json(const RunReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    json j;
    j["scope"] = std::string(scope_label(row.scope));
    j["image_id"] = row.image_id;
    j["size_class"] = size_label(row.size_class);
    j["method"] = std::string(to_string(row.method));
    j["dice"] = row.dice;
    j["precision"] = row.precision ? json(*row.precision) : json(nullptr);
    j["recall"] = row.recall ? json(*row.recall) : json(nullptr);
    j["degenerate"] = row.degenerate;
    j["u_avg"] = row.u_avg;
    j["u_avg_pixels"] = row.u_avg_pixels;
    j["excluded_fraction"] = row.excluded_fraction;
    j["count"] = row.count;
    rows.push_back(std::move(j));
  }
  json doc;
  doc["schema_version"] = 1;
  doc["rows"] = std::move(rows);
  return doc.dump(2) + "\n";
}

RunReport report_from_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    RunReport r;
    for (const auto& j : doc.at("rows")) {
      ReportRow row;
      row.scope = parse_scope(j.at("scope").get<std::string>());
      row.image_id = j.at("image_id").get<std::string>();
      row.size_class = parse_size_label(j.at("size_class").get<std::string>());
      row.method = require_method(j.at("method").get<std::string>());
      row.dice = j.at("dice").get<double>();
      if (!j.at("precision").is_null()) row.precision = j.at("precision").get<double>();
      if (!j.at("recall").is_null()) row.recall = j.at("recall").get<double>();
      row.degenerate = j.at("degenerate").get<bool>();
      row.u_avg = j.at("u_avg").get<double>();
      row.u_avg_pixels = j.at("u_avg_pixels").get<std::size_t>();
      row.excluded_fraction = j.at("excluded_fraction").get<double>();
      row.count = j.at("count").get<std::size_t>();
      r.rows.push_back(std::move(row));
    }
    return r;
  } catch (const json::exception& e) {
    fail(ErrorCode::MalformedHeader, std::string("report: ") + e.what());
  }
}

void write_report(const std::filesystem::path& prefix, const RunReport& r) {
  for (const auto& [ext, body] : {std::pair{".csv", report_to_csv(r)}, std::pair{".json", report_to_json(r)}}) {
    auto path = prefix;
    path += ext;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoFailure, "cannot create " + path.string());
    out << body;
  }
}

RunReport read_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoFailure, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return path.extension() == ".json" ? report_from_json(ss.str()) : report_from_csv(ss.str());
}

}  // namespace segunc
