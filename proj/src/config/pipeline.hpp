#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "config/experiment.hpp"
#include "infer/batch.hpp"
#include "ingest/manifest.hpp"
#include "smanet/network.hpp"
#include "train/trainer.hpp"
#include "weaklabel/weaklabel.hpp"

// End-to-end steps driven by an ExperimentConfig. Each step writes its
// artifacts plus a run_manifest.json into its output directory.
namespace weakseg::pipeline {

/// Network from the config's spec and seed, with pretrained weights applied
/// when configured.
std::unique_ptr<smanet::SegmentationNetwork> build_network(const config::ExperimentConfig& config);

/// Training records of the stage's datasets, mixed into one set.
std::shared_ptr<train::TrainingSet> stage_training_set(const config::ExperimentConfig& config,
                                                       const config::StageSpec& stage);

struct TrainOutcome {
  std::filesystem::path model;  // out_dir/model.ckpt
  train::TrainResult result;
};

/// Word crops of the bgfg dataset's train split; its test split, if any,
/// is the held-out set.
TrainOutcome train_bgfg(const config::ExperimentConfig& config, const std::filesystem::path& out_dir);

TrainOutcome train_segmentation(const config::ExperimentConfig& config, const std::filesystem::path& out_dir);

/// Weak labels for `manifest` (restricted to `split` when given) with the
/// background-foreground model at `model`.
weaklabel::GeneratedDataset generate_labels(const config::ExperimentConfig& config,
                                            const std::filesystem::path& model,
                                            const std::filesystem::path& manifest,
                                            std::optional<ingest::Split> split,
                                            const std::filesystem::path& out_dir, const std::string& name);

std::vector<infer::InferredImage> infer_images(const config::ExperimentConfig& config,
                                               const std::filesystem::path& model,
                                               const std::filesystem::path& images_dir,
                                               const std::filesystem::path& out_dir);

/// Factory loading a fresh copy of the checkpoint per call.
infer::ModelFactory checkpoint_model_factory(const std::filesystem::path& model);

/// Lowercase name safe for a directory: "Synth + COCO_TS" -> "synth_coco_ts".
std::string slug(const std::string& name);

}  // namespace weakseg::pipeline
