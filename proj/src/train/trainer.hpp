#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ingest/loaders.hpp"
#include "ingest/manifest.hpp"
#include "smanet/network.hpp"
#include "train/sampling.hpp"

namespace weakseg::train {

struct TrainConfig {
  int crop_size = 281;
  double learning_rate = 1e-4;
  std::vector<double> scales{0.75, 1.0, 1.25};
  int batch_size = 4;
  int max_steps = 1000;          // used by train_bgfg; stages carry their own budgets
  std::uint64_t seed = 1;
  bool fit_min_side = false;     // resize so the short side equals crop_size before scaling
  int log_every = 50;
  double f1_floor = 0.0;         // held-out F1 required of a background-foreground model

  /// Crop 185 with the short side fitted first.
  static TrainConfig bgfg_defaults();
  /// Throws invalid_argument naming the field.
  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

/// Random-access source of (image, label map) pairs.
class TrainingSet {
 public:
  virtual ~TrainingSet() = default;
  virtual std::size_t size() const = 0;
  virtual TrainingPair get(std::size_t index) const = 0;
};

class MemoryTrainingSet : public TrainingSet {
 public:
  explicit MemoryTrainingSet(std::vector<TrainingPair> pairs) : pairs_(std::move(pairs)) {}
  std::size_t size() const override { return pairs_.size(); }
  TrainingPair get(std::size_t index) const override { return pairs_.at(index); }
  const std::vector<TrainingPair>& pairs() const { return pairs_; }

 private:
  std::vector<TrainingPair> pairs_;
};

MemoryTrainingSet synth_training_set(std::vector<ingest::SynthCrop> crops);

/// Records of `split` that have pixel labels; images are decoded on demand.
class ManifestTrainingSet : public TrainingSet {
 public:
  explicit ManifestTrainingSet(ingest::DatasetManifest manifest,
                               std::optional<ingest::Split> split = ingest::Split::kTrain);
  std::size_t size() const override { return records_.size(); }
  TrainingPair get(std::size_t index) const override;

 private:
  ingest::DatasetManifest manifest_;
  std::vector<std::size_t> records_;
};

/// Several datasets drawn from as one (single-stage mixtures).
class ConcatTrainingSet : public TrainingSet {
 public:
  explicit ConcatTrainingSet(std::vector<std::shared_ptr<TrainingSet>> parts);
  std::size_t size() const override { return total_; }
  TrainingPair get(std::size_t index) const override;

 private:
  std::vector<std::shared_ptr<TrainingSet>> parts_;
  std::size_t total_ = 0;
};

struct Stage {
  std::string name;
  std::shared_ptr<TrainingSet> data;
  int steps = 0;
};

struct TrainResult {
  std::vector<double> losses;                       // one per step, all stages
  std::vector<std::filesystem::path> checkpoints;   // one per stage, in order
  std::optional<double> heldout_f1;
};

/// Called after every optimiser step with the global step and its loss.
using StepCallback = std::function<void(std::int64_t step, double loss)>;

/// Background-foreground training for config.max_steps. If `heldout` is
/// given, its F1 is measured after training and must reach config.f1_floor.
TrainResult train_bgfg(smanet::SegmentationNetwork& network, const TrainConfig& config,
                       const TrainingSet& crops, const std::filesystem::path& checkpoint,
                       const std::string& config_digest = "", const TrainingSet* heldout = nullptr,
                       const StepCallback& on_step = {});

/// Stages run in order on the same weights; each ends with a checkpoint
/// out_dir/stage<k>_<name>.ckpt. A fresh optimiser starts every stage.
TrainResult train_segmentation(smanet::SegmentationNetwork& network, const TrainConfig& config,
                               const std::vector<Stage>& stages, const std::filesystem::path& out_dir,
                               const std::string& config_digest = "", const StepCallback& on_step = {});

/// Pooled F1 of the network's prediction (argmax, single full-image pass)
/// against each pair's label map.
double training_f1(smanet::SegmentationNetwork& network, const TrainingSet& data);

}  // namespace weakseg::train
