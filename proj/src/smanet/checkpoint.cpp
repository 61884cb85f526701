#include "smanet/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <map>
#include <vector>

#include "core/error.hpp"

namespace weakseg::smanet {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'W', 'S', 'E', 'G', 'C', 'K', 'P', '1'};

struct RawCheckpoint {
  json header;
  std::map<std::string, nn::Tensor> tensors;
};

RawCheckpoint read_raw(const fs::path& path, bool with_tensors) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open checkpoint " + path.string());
  char magic[8];
  std::uint64_t header_size = 0;
  in.read(magic, sizeof magic);
  in.read(reinterpret_cast<char*>(&header_size), sizeof header_size);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw format_error("not a weakseg checkpoint: " + path.string());
  }
  if (header_size > (1u << 26)) throw format_error("checkpoint header too large: " + path.string());
  std::string text(header_size, '\0');
  in.read(text.data(), static_cast<std::streamsize>(header_size));
  if (!in) throw format_error("truncated checkpoint header: " + path.string());
  RawCheckpoint raw;
  try {
    raw.header = json::parse(text);
  } catch (const json::exception& e) {
    throw format_error("corrupt checkpoint header in " + path.string() + ": " + e.what());
  }
  if (!with_tensors) return raw;
  try {
    for (const auto& entry : raw.header.at("tensors")) {
      const auto dims = entry.at("shape").get<std::vector<int>>();
      if (dims.size() != 4) throw format_error("tensor shape must have four extents");
      nn::Tensor t(nn::Shape{dims[0], dims[1], dims[2], dims[3]});
      in.read(reinterpret_cast<char*>(t.data()), static_cast<std::streamsize>(t.numel() * sizeof(double)));
      if (!in) throw format_error("truncated tensor data in " + path.string());
      raw.tensors.emplace(entry.at("name").get<std::string>(), std::move(t));
    }
  } catch (const json::exception& e) {
    throw format_error("corrupt checkpoint tensor table in " + path.string() + ": " + e.what());
  }
  return raw;
}

CheckpointInfo info_from_header(const json& header) {
  CheckpointInfo info;
  try {
    info.spec = NetworkSpec::from_json(header.at("spec"));
    info.step = header.at("step").get<std::int64_t>();
    info.config_digest = header.value("config_digest", "");
    info.extra = header.value("extra", json::object());
  } catch (const json::exception& e) {
    throw format_error(std::string("corrupt checkpoint metadata: ") + e.what());
  }
  return info;
}

}  // namespace

void save_checkpoint(const fs::path& path, const SegmentationNetwork& network, std::int64_t step,
                     const std::string& config_digest, const json& extra) {
  const auto state = network.named_state();
  nlohmann::ordered_json header;
  header["format"] = 1;
  header["spec"] = network.spec().to_json();
  header["step"] = step;
  header["config_digest"] = config_digest;
  header["extra"] = extra;
  header["tensors"] = nlohmann::ordered_json::array();
  for (const auto& [name, var] : state) {
    const nn::Shape s = var.shape();
    header["tensors"].push_back({{"name", name}, {"shape", {s.n, s.c, s.h, s.w}}});
  }
  const std::string text = header.dump();
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot write checkpoint " + tmp.string());
    const std::uint64_t size = text.size();
    out.write(kMagic, sizeof kMagic);
    out.write(reinterpret_cast<const char*>(&size), sizeof size);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (const auto& [name, var] : state) {
      const nn::Tensor& t = var.value();
      out.write(reinterpret_cast<const char*>(t.data()), static_cast<std::streamsize>(t.numel() * sizeof(double)));
    }
    if (!out.flush()) throw io_error("failed writing checkpoint " + tmp.string());
  }
  fs::rename(tmp, path);
}

CheckpointInfo read_checkpoint_info(const fs::path& path) {
  return info_from_header(read_raw(path, false).header);
}

std::unique_ptr<SegmentationNetwork> load_checkpoint(const fs::path& path, CheckpointInfo* info) {
  RawCheckpoint raw = read_raw(path, true);
  CheckpointInfo meta = info_from_header(raw.header);
  auto network = build_network(meta.spec, 0);
  for (auto& [name, var] : network->named_state()) {
    auto it = raw.tensors.find(name);
    if (it == raw.tensors.end()) throw format_error("checkpoint is missing tensor " + name);
    if (!(it->second.shape() == var.shape())) {
      throw format_error("checkpoint tensor " + name + " has shape " + it->second.shape().str() +
                         ", expected " + var.shape().str());
    }
    var.mutable_value() = it->second;
  }
  if (raw.tensors.size() != network->named_state().size()) {
    throw format_error("checkpoint holds tensors unknown to its own spec");
  }
  network->set_training(false);
  if (info) *info = std::move(meta);
  return network;
}

std::size_t load_matching_weights(const fs::path& path, SegmentationNetwork& network) {
  RawCheckpoint raw = read_raw(path, true);
  std::size_t copied = 0;
  for (auto& [name, var] : network.named_state()) {
    auto it = raw.tensors.find(name);
    if (it != raw.tensors.end() && it->second.shape() == var.shape()) {
      var.mutable_value() = it->second;
      ++copied;
    }
  }
  return copied;
}

}  // namespace weakseg::smanet
