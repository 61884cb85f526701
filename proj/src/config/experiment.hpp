#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "infer/predict.hpp"
#include "smanet/network_spec.hpp"
#include "train/trainer.hpp"
#include "weaklabel/weaklabel.hpp"

namespace weakseg::config {

/// One training stage; several dataset ids are drawn from as one mixture.
struct StageSpec {
  std::vector<std::string> datasets;
  int steps = 0;
  bool operator==(const StageSpec&) const = default;
};

/// "synth:200k,coco_ts+mlt_s:100k". Step counts accept k and M suffixes.
std::vector<StageSpec> parse_stages(const std::string& text);
std::string format_stages(const std::vector<StageSpec>& stages);

struct ExperimentConfig {
  std::string name = "default";
  std::string baseline;  // setup the F1 delta is measured against; empty for none
  std::string block;     // rows sharing a block are printed together

  smanet::NetworkSpec network;
  std::string pretrained;  // optional weight file copied by name and shape
  std::string checkpoint;  // model to evaluate instead of training one

  std::vector<StageSpec> stages;
  train::TrainConfig train;
  train::TrainConfig bgfg = train::TrainConfig::bgfg_defaults();
  std::string bgfg_data = "synth";
  double bgfg_enlarge = 0.3;

  weaklabel::LabelOptions labels;
  infer::InferencePolicy inference;

  std::vector<std::string> test_sets;
  std::map<std::string, std::string> datasets;  // id -> manifest path
  bool per_image = false;

  std::uint64_t seed = 1;
  std::string output_root = "runs";
  std::string data_root;  // base for relative dataset paths; WEAKSEG_DATA_ROOT if empty
  int workers = 1;

  std::filesystem::path source_dir;  // directory of the file it was read from; not serialised

  bool operator==(const ExperimentConfig& o) const;

  /// Throws invalid_argument naming the offending key.
  void validate() const;

  /// Sets one key from its text form, e.g. ("train.crop_size", "185").
  /// Unknown keys and malformed values throw, naming the key.
  void set(const std::string& key, const std::string& value);
  std::string get(const std::string& key) const;

  /// Every key, one "key = value" line each, in a fixed order.
  std::string serialize() const;
  /// FNV-1a 64 of serialize(), as 16 hex digits.
  std::string digest() const;

  /// Absolute path of a declared dataset's manifest. Relative paths are taken
  /// from data_root, then WEAKSEG_DATA_ROOT, then the config file directory.
  std::filesystem::path dataset_path(const std::string& id) const;

  /// Training configuration with the experiment seed applied.
  train::TrainConfig seg_train_config() const;
  train::TrainConfig bgfg_train_config() const;
};

/// Keys in serialisation order (dataset.<id> entries excluded).
const std::vector<std::string>& config_keys();

ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<string>");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Global keys followed by [setup NAME] sections; each section starts from
/// the globals and overrides them. Names must be unique.
std::vector<ExperimentConfig> parse_matrix(const std::string& text, const std::string& origin = "<string>");
std::vector<ExperimentConfig> load_matrix(const std::filesystem::path& path);

std::string fnv1a_hex(const std::string& bytes);

}  // namespace weakseg::config
