#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/geometry.hpp"
#include "core/label_io.hpp"

namespace weakseg::ingest {

enum class Split { kTrain, kVal, kTest };
const char* to_string(Split split);
Split split_from_string(const std::string& text);

struct SampleRecord {
  std::string id;
  std::string image_path;               // relative to the manifest root unless absolute
  std::optional<std::string> gt_path;   // pixel-level ground truth, when the dataset has it
  GtEncoding gt_encoding = GtEncoding::kLabelMap;
  Split split = Split::kTrain;
  std::vector<TextBox> boxes;
  bool missing = false;                 // image file absent or unreadable at ingest time
  std::string note;                     // reason for the flag, if any

  bool operator==(const SampleRecord&) const = default;
};

struct DatasetManifest {
  std::string dataset;
  std::string root;
  nlohmann::json filters = nlohmann::json::object();  // attribute filters applied so far
  std::vector<SampleRecord> records;

  bool operator==(const DatasetManifest&) const = default;

  std::filesystem::path resolve(const std::string& path) const;
  /// Throws if two records share an id.
  void validate() const;
  std::size_t count(Split split) const;
};

nlohmann::ordered_json box_to_json(const TextBox& box);
TextBox box_from_json(const nlohmann::json& j);
nlohmann::ordered_json record_to_json(const SampleRecord& record);
SampleRecord record_from_json(const nlohmann::json& j);

/// JSON Lines: one header object, then one object per record.
void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);
DatasetManifest read_manifest(const std::filesystem::path& path);

}  // namespace weakseg::ingest
