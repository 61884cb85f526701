#include "train/trainer.hpp"

#include <cmath>

#include "core/error.hpp"
#include "core/log.hpp"
#include "eval/metrics.hpp"
#include "infer/network_model.hpp"
#include "infer/predict.hpp"
#include "nn/adam.hpp"
#include "smanet/checkpoint.hpp"
#include "train/loss.hpp"

namespace weakseg::train {

TrainConfig TrainConfig::bgfg_defaults() {
  TrainConfig c;
  c.crop_size = 185;
  c.fit_min_side = true;
  return c;
}

void TrainConfig::validate() const {
  if (crop_size <= 0) throw invalid_argument("crop_size must be positive");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw invalid_argument("learning_rate must be positive");
  if (scales.empty()) throw invalid_argument("scales must not be empty");
  for (double s : scales)
    if (!(s > 0.0) || !std::isfinite(s)) throw invalid_argument("scales must be positive");
  if (batch_size <= 0) throw invalid_argument("batch_size must be positive");
  if (max_steps < 0) throw invalid_argument("max_steps must be >= 0");
  if (log_every < 0) throw invalid_argument("log_every must be >= 0");
  if (f1_floor < 0.0 || f1_floor > 1.0) throw invalid_argument("f1_floor must be in [0, 1]");
}

MemoryTrainingSet synth_training_set(std::vector<ingest::SynthCrop> crops) {
  std::vector<TrainingPair> pairs;
  pairs.reserve(crops.size());
  for (auto& c : crops) pairs.push_back({std::move(c.image), std::move(c.mask)});
  return MemoryTrainingSet(std::move(pairs));
}

ManifestTrainingSet::ManifestTrainingSet(ingest::DatasetManifest manifest, std::optional<ingest::Split> split)
    : manifest_(std::move(manifest)) {
  for (std::size_t i = 0; i < manifest_.records.size(); ++i) {
    const auto& r = manifest_.records[i];
    if (r.missing || !r.gt_path) continue;
    if (split && r.split != *split) continue;
    records_.push_back(i);
  }
  if (records_.empty()) throw invalid_argument("dataset '" + manifest_.dataset + "' has no labelled training records");
}

TrainingPair ManifestTrainingSet::get(std::size_t index) const {
  const auto& r = manifest_.records.at(records_.at(index));
  TrainingPair p{read_rgb(manifest_.resolve(r.image_path).string()),
                 read_ground_truth(manifest_.resolve(*r.gt_path).string(), r.gt_encoding)};
  if (p.image.size() != p.label.size()) throw format_error("record " + r.id + ": image and label sizes differ");
  return p;
}

ConcatTrainingSet::ConcatTrainingSet(std::vector<std::shared_ptr<TrainingSet>> parts) : parts_(std::move(parts)) {
  for (const auto& p : parts_) total_ += p->size();
}

TrainingPair ConcatTrainingSet::get(std::size_t index) const {
  for (const auto& p : parts_) {
    if (index < p->size()) return p->get(index);
    index -= p->size();
  }
  throw invalid_argument("training index out of range");
}

namespace {

void run_steps(smanet::SegmentationNetwork& network, const TrainConfig& config, const TrainingSet& data,
               int steps, nn::Rng& rng, const std::string& stage, TrainResult& result,
               const StepCallback& on_step) {
  if (data.size() == 0) throw invalid_argument("stage '" + stage + "' has no training data");
  network.set_training(true);
  std::vector<nn::Var> params;
  for (auto& [name, v] : network.named_parameters()) params.push_back(v);
  nn::Adam optimizer(std::move(params), nn::AdamOptions{config.learning_rate});

  double smoothed = 0.0;
  for (int s = 0; s < steps; ++s) {
    std::vector<TrainingPair> batch;
    std::vector<LabelMap> labels;
    for (int b = 0; b < config.batch_size; ++b) {
      const auto index = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(data.size()) - 1));
      const TrainingPair pair = data.get(index);
      batch.push_back(sample_training_crop(pair.image, pair.label, config.crop_size, config.scales, rng,
                                           config.fit_min_side));
      labels.push_back(batch.back().label);
    }
    optimizer.zero_grad();
    nn::Var input(batch_images(batch));
    nn::Var loss = masked_loss(network.forward(input), labels);
    const double value = loss.value().values()[0];
    const std::int64_t global = static_cast<std::int64_t>(result.losses.size()) + 1;
    if (!std::isfinite(value)) {
      throw Error(ErrorKind::kDiverged, "training diverged: loss is " + std::to_string(value) + " at step " +
                                            std::to_string(global) + " (stage '" + stage + "')");
    }
    nn::backward(loss);
    optimizer.step();
    result.losses.push_back(value);
    smoothed = s == 0 ? value : 0.9 * smoothed + 0.1 * value;
    if (config.log_every > 0 && (s + 1) % config.log_every == 0) {
      log::info(stage, " step ", s + 1, "/", steps, " loss ", value, " smoothed ", smoothed);
    }
    if (on_step) on_step(global, value);
  }
}

}  // namespace

double training_f1(smanet::SegmentationNetwork& network, const TrainingSet& data) {
  infer::NetworkModel model(network);
  eval::PixelCounts counts;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const TrainingPair p = data.get(i);
    counts += eval::accumulate_counts(infer::binarize(model.predict(p.image), 0.5), p.label);
  }
  network.set_training(true);
  return eval::compute_metrics(counts).f1;
}

TrainResult train_bgfg(smanet::SegmentationNetwork& network, const TrainConfig& config, const TrainingSet& crops,
                       const std::filesystem::path& checkpoint, const std::string& config_digest,
                       const TrainingSet* heldout, const StepCallback& on_step) {
  config.validate();
  TrainResult result;
  nn::Rng rng(config.seed);
  run_steps(network, config, crops, config.max_steps, rng, "bgfg", result, on_step);
  save_checkpoint(checkpoint, network, static_cast<std::int64_t>(result.losses.size()), config_digest,
                  {{"task", "bgfg"}, {"stage", "bgfg"}});
  result.checkpoints.push_back(checkpoint);
  if (heldout) {
    result.heldout_f1 = training_f1(network, *heldout);
    log::info("bgfg held-out F1 ", *result.heldout_f1);
    if (*result.heldout_f1 < config.f1_floor) {
      throw runtime_error("held-out F1 " + std::to_string(*result.heldout_f1) + " is below the floor " +
                          std::to_string(config.f1_floor));
    }
  }
  network.set_training(false);
  return result;
}

TrainResult train_segmentation(smanet::SegmentationNetwork& network, const TrainConfig& config,
                               const std::vector<Stage>& stages, const std::filesystem::path& out_dir,
                               const std::string& config_digest, const StepCallback& on_step) {
  config.validate();
  if (stages.empty()) throw invalid_argument("at least one training stage is required");
  for (const Stage& st : stages) {
    if (!st.data) throw invalid_argument("stage '" + st.name + "' has no dataset");
    if (st.steps < 0) throw invalid_argument("stage '" + st.name + "' has a negative step budget");
  }
  TrainResult result;
  nn::Rng rng(config.seed);
  for (std::size_t k = 0; k < stages.size(); ++k) {
    const Stage& st = stages[k];
    log::info("stage ", k + 1, "/", stages.size(), " '", st.name, "': ", st.steps, " steps on ", st.data->size(),
              " images");
    run_steps(network, config, *st.data, st.steps, rng, st.name, result, on_step);
    const auto path = out_dir / ("stage" + std::to_string(k + 1) + "_" + st.name + ".ckpt");
    save_checkpoint(path, network, static_cast<std::int64_t>(result.losses.size()), config_digest,
                    {{"task", "seg"}, {"stage", st.name}, {"stage_index", k + 1}});
    result.checkpoints.push_back(path);
  }
  network.set_training(false);
  return result;
}

}  // namespace weakseg::train
