#pragma once

#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <memory>
#include <string>

#include "smanet/network.hpp"

namespace weakseg::smanet {

struct CheckpointInfo {
  NetworkSpec spec;
  std::int64_t step = 0;
  std::string config_digest;
  nlohmann::json extra = nlohmann::json::object();  // e.g. training stage name
};

/// Writes spec, metadata and every named parameter and buffer. The file is
/// written next to its destination and renamed into place.
void save_checkpoint(const std::filesystem::path& path, const SegmentationNetwork& network,
                     std::int64_t step, const std::string& config_digest,
                     const nlohmann::json& extra = nlohmann::json::object());

CheckpointInfo read_checkpoint_info(const std::filesystem::path& path);

/// Rebuilds the network from the spec stored in the file and restores all
/// state. The result is in evaluation mode.
std::unique_ptr<SegmentationNetwork> load_checkpoint(const std::filesystem::path& path,
                                                     CheckpointInfo* info = nullptr);

/// Copies every tensor whose name and shape match into `network`; used for
/// externally supplied encoder weights. Returns the number of tensors copied.
std::size_t load_matching_weights(const std::filesystem::path& path, SegmentationNetwork& network);

}  // namespace weakseg::smanet
