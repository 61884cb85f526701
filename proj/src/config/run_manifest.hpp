#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace weakseg::config {

const char* code_version();

/// Record of one command run: what configuration produced which files.
struct RunManifest {
  std::string command;
  std::string config_digest;
  std::string code_version = config::code_version();
  std::string started;   // UTC, ISO 8601
  std::string finished;
  std::vector<std::string> artifacts;
  nlohmann::json environment = nlohmann::json::object();

  static RunManifest begin(const std::string& command, const std::string& config_digest);
  void add_artifact(const std::filesystem::path& path);
  /// Stamps `finished` and writes JSON to `path` (atomically).
  void finish(const std::filesystem::path& path);

  nlohmann::ordered_json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
};

std::string utc_timestamp();

}  // namespace weakseg::config
