#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "segunc/transform_record.hpp"

namespace segunc {

/// Ordered transform sequence behind a TTA volume, replayable by external runners.
struct TtaManifest {
  static constexpr int kSchemaVersion = 1;

  std::string image_id;
  std::vector<TransformRecord> transforms;

  std::size_t passes() const noexcept { return transforms.size(); }
  bool operator==(const TtaManifest&) const = default;
};

std::string manifest_to_json(const TtaManifest& m);
/// Throws MalformedHeader on schema violations (wrong version, T != list length, bad kinds).
TtaManifest manifest_from_json(const std::string& text);

void write_manifest(const std::filesystem::path& path, const TtaManifest& m);
TtaManifest read_manifest(const std::filesystem::path& path);

}  // namespace segunc
