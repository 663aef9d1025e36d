#include "cli/dataset.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace segunc::cli {

using nlohmann::json;

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoFailure, "cannot create " + path.string());
  out << text;
  if (!out) fail(ErrorCode::IoFailure, "write failed for " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoFailure, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path resolve(const std::filesystem::path& index_file, const std::string& relative) {
  const std::filesystem::path p(relative);
  if (p.is_absolute()) return p;
  return index_file.parent_path() / p;
}

std::string relative_to(const std::filesystem::path& index_file, const std::filesystem::path& target) {
  const auto base = std::filesystem::absolute(index_file).parent_path();
  return std::filesystem::absolute(target).lexically_relative(base).generic_string();
}

std::string_view log_base_label(LogBase base) { return base == LogBase::Bits ? "2" : "e"; }

LogBase parse_log_base(const std::string& s) {
  if (s == "2") return LogBase::Bits;
  if (s == "e") return LogBase::Nats;
  fail(ErrorCode::InvalidArgument, "log base must be 2 or e, got '" + s + "'");
}

void write_dataset_index(const std::filesystem::path& path, const DatasetIndex& index) {
  json items = json::array();
  for (const auto& it : index.items) {
    items.push_back({{"image_id", it.image_id},
                     {"image", it.image},
                     {"mask", it.mask},
                     {"plain", it.plain},
                     {"mc", it.mc},
                     {"tta", it.tta},
                     {"tta_manifest", it.tta_manifest}});
  }
  json doc{{"schema_version", 1}, {"passes", index.passes}, {"items", items}};
  write_text(path, doc.dump(2) + "\n");
}

DatasetIndex read_dataset_index(const std::filesystem::path& path) {
  try {
    const json doc = json::parse(read_text(path));
    DatasetIndex index;
    index.passes = doc.at("passes").get<std::size_t>();
    for (const auto& j : doc.at("items")) {
      DatasetItem it;
      it.image_id = j.at("image_id").get<std::string>();
      it.image = j.value("image", "");
      it.mask = j.at("mask").get<std::string>();
      it.plain = j.value("plain", "");
      it.mc = j.value("mc", "");
      it.tta = j.value("tta", "");
      it.tta_manifest = j.value("tta_manifest", "");
      index.items.push_back(std::move(it));
    }
    return index;
  } catch (const json::exception& e) {
    fail(ErrorCode::MalformedHeader, path.string() + ": " + e.what());
  }
}

void write_quantified_index(const std::filesystem::path& path, const QuantifiedIndex& index) {
  json items = json::array();
  for (const auto& it : index.items) {
    json methods = json::object();
    for (const auto& [m, q] : it.methods) {
      methods[std::string(to_string(m))] = {{"mean", q.mean},
                                            {"entropy", q.entropy},
                                            {"passes", q.passes},
                                            {"u_avg", q.u_avg},
                                            {"u_avg_pixels", q.u_avg_pixels}};
    }
    items.push_back({{"image_id", it.image_id}, {"image", it.image}, {"mask", it.mask}, {"methods", methods}});
  }
  json doc{{"schema_version", 1}, {"log_base", std::string(log_base_label(index.base))}, {"items", items}};
  write_text(path, doc.dump(2) + "\n");
}

QuantifiedIndex read_quantified_index(const std::filesystem::path& path) {
  try {
    const json doc = json::parse(read_text(path));
    QuantifiedIndex index;
    index.base = parse_log_base(doc.at("log_base").get<std::string>());
    for (const auto& j : doc.at("items")) {
      QuantifiedItem it;
      it.image_id = j.at("image_id").get<std::string>();
      it.image = j.value("image", "");
      it.mask = j.at("mask").get<std::string>();
      for (const auto& [name, q] : j.at("methods").items()) {
        const auto m = parse_method(name);
        if (!m) fail(ErrorCode::MalformedHeader, "unknown method '" + name + "'");
        it.methods[*m] = {q.at("mean").get<std::string>(), q.at("entropy").get<std::string>(),
                          q.at("passes").get<std::size_t>(), q.at("u_avg").get<double>(),
                          q.at("u_avg_pixels").get<std::size_t>()};
      }
      index.items.push_back(std::move(it));
    }
    return index;
  } catch (const json::exception& e) {
    fail(ErrorCode::MalformedHeader, path.string() + ": " + e.what());
  }
}

}  // namespace segunc::cli
