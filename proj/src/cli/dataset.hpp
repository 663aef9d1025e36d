#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "segunc/report.hpp"
#include "segunc/types.hpp"

namespace segunc::cli {

/// One synthetic (or user-assembled) case. Paths are relative to the index file.
struct DatasetItem {
  std::string image_id;
  std::string image;
  std::string mask;
  std::string plain;         // single-pass volume -> no-uncertainty
  std::string mc;            // MC dropout volume -> epistemic
  std::string tta;           // TTA volume -> aleatoric
  std::string tta_manifest;
};

struct DatasetIndex {
  std::size_t passes = 10;
  std::vector<DatasetItem> items;
};

void write_dataset_index(const std::filesystem::path& path, const DatasetIndex& index);
DatasetIndex read_dataset_index(const std::filesystem::path& path);

struct QuantifiedMethod {
  std::string mean;
  std::string entropy;
  std::size_t passes = 0;
  double u_avg = 0.0;
  std::size_t u_avg_pixels = 0;
};

struct QuantifiedItem {
  std::string image_id;
  std::string image;
  std::string mask;
  std::map<Method, QuantifiedMethod> methods;
};

struct QuantifiedIndex {
  LogBase base = LogBase::Bits;
  std::vector<QuantifiedItem> items;
};

void write_quantified_index(const std::filesystem::path& path, const QuantifiedIndex& index);
QuantifiedIndex read_quantified_index(const std::filesystem::path& path);

std::string_view log_base_label(LogBase base);
LogBase parse_log_base(const std::string& s);

/// `relative` resolved against the directory holding `index_file`.
std::filesystem::path resolve(const std::filesystem::path& index_file, const std::string& relative);

/// `target` expressed relative to the directory that will hold `index_file`.
std::string relative_to(const std::filesystem::path& index_file, const std::filesystem::path& target);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace segunc::cli
