#include "config/run_manifest.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <thread>

#include "core/error.hpp"

#ifndef WEAKSEG_VERSION
#define WEAKSEG_VERSION "0.0.0"
#endif

namespace weakseg::config {

const char* code_version() { return WEAKSEG_VERSION; }

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunManifest RunManifest::begin(const std::string& command, const std::string& config_digest) {
  RunManifest m;
  m.command = command;
  m.config_digest = config_digest;
  m.started = utc_timestamp();
  m.environment["hardware_threads"] = std::thread::hardware_concurrency();
#if defined(__clang__)
  m.environment["compiler"] = std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
  m.environment["compiler"] = std::string("gcc ") + __VERSION__;
#endif
  m.environment["precision"] = "float64";
  return m;
}

void RunManifest::add_artifact(const std::filesystem::path& path) { artifacts.push_back(path.string()); }

nlohmann::ordered_json RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["config_digest"] = config_digest;
  j["code_version"] = code_version;
  j["started"] = started;
  j["finished"] = finished;
  j["artifacts"] = artifacts;
  j["environment"] = environment;
  return j;
}

RunManifest RunManifest::from_json(const nlohmann::json& j) {
  RunManifest m;
  try {
    m.command = j.at("command").get<std::string>();
    m.config_digest = j.at("config_digest").get<std::string>();
    m.code_version = j.at("code_version").get<std::string>();
    m.started = j.at("started").get<std::string>();
    m.finished = j.at("finished").get<std::string>();
    m.artifacts = j.at("artifacts").get<std::vector<std::string>>();
    m.environment = j.value("environment", nlohmann::json::object());
  } catch (const nlohmann::json::exception& e) {
    throw format_error(std::string("run manifest: ") + e.what());
  }
  return m;
}

void RunManifest::finish(const std::filesystem::path& path) {
  finished = utc_timestamp();
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw io_error("cannot write " + tmp);
    out << to_json().dump(2) << "\n";
    if (!out) throw io_error("cannot write " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace weakseg::config
