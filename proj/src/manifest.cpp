#include "segunc/manifest.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

#include "segunc/error.hpp"

namespace segunc {

using nlohmann::json;

namespace {

const char* amount_key(TransformKind kind) {
  switch (kind) {
    case TransformKind::Brightness: return "delta";
    case TransformKind::Contrast: return "factor";
    case TransformKind::GaussianBlur: return "sigma";
    default: return nullptr;
  }
}

TransformKind parse_kind(const std::string& s) {
  for (int k = 0; k < kTransformKindCount; ++k) {
    const auto kind = static_cast<TransformKind>(k);
    if (to_string(kind) == s) return kind;
  }
  fail(ErrorCode::MalformedHeader, "unknown transform kind '" + s + "'");
}

}  // namespace

std::string manifest_to_json(const TtaManifest& m) {
  json doc;
  doc["schema_version"] = TtaManifest::kSchemaVersion;
  doc["image_id"] = m.image_id;
  doc["passes"] = m.passes();
  json list = json::array();
  for (const auto& t : m.transforms) {
    json item;
    item["kind"] = std::string(to_string(t.kind));
    if (t.kind == TransformKind::Rotate90) item["quarter_turns"] = t.quarter_turns;
    if (const char* key = amount_key(t.kind)) item[key] = t.amount;
    item["seed"] = t.seed;
    item["invertibility"] = std::string(to_string(t.invertibility()));
    list.push_back(std::move(item));
  }
  doc["transforms"] = std::move(list);
  return doc.dump(2) + "\n";
}

TtaManifest manifest_from_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    if (doc.at("schema_version").get<int>() != TtaManifest::kSchemaVersion) {
      fail(ErrorCode::MalformedHeader, "unsupported manifest schema version");
    }
    TtaManifest m;
    m.image_id = doc.at("image_id").get<std::string>();
    for (const auto& item : doc.at("transforms")) {
      TransformRecord t;
      t.kind = parse_kind(item.at("kind").get<std::string>());
      if (t.kind == TransformKind::Rotate90) t.quarter_turns = item.at("quarter_turns").get<int>();
      if (const char* key = amount_key(t.kind)) t.amount = item.at(key).get<double>();
      t.seed = item.at("seed").get<std::uint64_t>();
      if (item.contains("invertibility") &&
          item.at("invertibility").get<std::string>() != to_string(t.invertibility())) {
        fail(ErrorCode::MalformedHeader, "invertibility does not match kind " + std::string(to_string(t.kind)));
      }
      validate(t);
      m.transforms.push_back(t);
    }
    if (doc.at("passes").get<std::size_t>() != m.transforms.size()) {
      fail(ErrorCode::MalformedHeader, "manifest pass count differs from transform list length");
    }
    return m;
  } catch (const json::exception& e) {
    fail(ErrorCode::MalformedHeader, std::string("manifest: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidArgument) fail(ErrorCode::MalformedHeader, std::string("manifest: ") + e.what());
    throw;
  }
}

void write_manifest(const std::filesystem::path& path, const TtaManifest& m) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoFailure, "cannot create " + path.string());
  out << manifest_to_json(m);
}

TtaManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoFailure, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return manifest_from_json(ss.str());
}

}  // namespace segunc
