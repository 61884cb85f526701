#include "config/pipeline.hpp"

#include <fstream>

#include "config/run_manifest.hpp"
#include "core/error.hpp"
#include "core/log.hpp"
#include "infer/network_model.hpp"
#include "ingest/loaders.hpp"
#include "smanet/checkpoint.hpp"

namespace weakseg::pipeline {

namespace fs = std::filesystem;

namespace {

// Owns its network so each worker can hold an independent copy.
class OwningNetworkModel : public infer::ProbabilityModel {
 public:
  explicit OwningNetworkModel(std::unique_ptr<smanet::SegmentationNetwork> net)
      : net_(std::move(net)), model_(*net_) {}
  Plane predict(const RgbImage& tile) override { return model_.predict(tile); }

 private:
  std::unique_ptr<smanet::SegmentationNetwork> net_;
  infer::NetworkModel model_;
};

void write_loss_curve(const fs::path& path, const std::vector<double>& losses) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write " + path.string());
  out << "step,loss\n";
  out.precision(17);
  for (std::size_t i = 0; i < losses.size(); ++i) out << i + 1 << "," << losses[i] << "\n";
}

ingest::DatasetManifest load_dataset(const config::ExperimentConfig& config, const std::string& id) {
  const fs::path path = config.dataset_path(id);
  if (!fs::exists(path)) throw io_error("dataset '" + id + "': manifest " + path.string() + " not found");
  return ingest::read_manifest(path);
}

ingest::DatasetManifest only_split(ingest::DatasetManifest m, ingest::Split split) {
  std::erase_if(m.records, [&](const ingest::SampleRecord& r) { return r.split != split; });
  return m;
}

void save_config(const config::ExperimentConfig& config, const fs::path& dir) {
  std::ofstream out(dir / "config.cfg");
  if (!out) throw io_error("cannot write " + (dir / "config.cfg").string());
  out << config.serialize();
}

}  // namespace

std::string slug(const std::string& name) {
  std::string out;
  for (unsigned char c : name) {
    if (std::isalnum(c)) {
      out += static_cast<char>(std::tolower(c));
    } else if (!out.empty() && out.back() != '_') {
      out += '_';
    }
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out.empty() ? "setup" : out;
}

std::unique_ptr<smanet::SegmentationNetwork> build_network(const config::ExperimentConfig& config) {
  auto net = smanet::build_network(config.network, config.seed);
  if (!config.pretrained.empty()) {
    fs::path p(config.pretrained);
    if (p.is_relative()) p = config.source_dir / p;
    const std::size_t copied = smanet::load_matching_weights(p, *net);
    log::info("copied ", copied, " pretrained tensors from ", p.string());
  }
  return net;
}

std::shared_ptr<train::TrainingSet> stage_training_set(const config::ExperimentConfig& config,
                                                       const config::StageSpec& stage) {
  std::vector<std::shared_ptr<train::TrainingSet>> parts;
  for (const std::string& id : stage.datasets) {
    parts.push_back(std::make_shared<train::ManifestTrainingSet>(load_dataset(config, id), ingest::Split::kTrain));
  }
  if (parts.size() == 1) return parts[0];
  return std::make_shared<train::ConcatTrainingSet>(std::move(parts));
}

TrainOutcome train_bgfg(const config::ExperimentConfig& config, const fs::path& out_dir) {
  config.validate();
  fs::create_directories(out_dir);
  auto run = config::RunManifest::begin("train --task bgfg", config.digest());
  const ingest::DatasetManifest data = load_dataset(config, config.bgfg_data);
  auto crops = train::synth_training_set(
      ingest::extract_synth_crops(only_split(data, ingest::Split::kTrain), config.bgfg_enlarge));
  if (crops.size() == 0) throw invalid_argument("dataset '" + config.bgfg_data + "' yields no training word crops");
  std::optional<train::MemoryTrainingSet> heldout;
  const ingest::DatasetManifest test = only_split(data, ingest::Split::kTest);
  if (!test.records.empty()) {
    heldout = train::synth_training_set(ingest::extract_synth_crops(test, config.bgfg_enlarge));
    if (heldout->size() == 0) heldout.reset();
  }
  log::info("bgfg training on ", crops.size(), " word crops", heldout ? " with " + std::to_string(heldout->size()) + " held out" : "");

  auto net = build_network(config);
  TrainOutcome out;
  out.model = out_dir / "model.ckpt";
  out.result = train::train_bgfg(*net, config.bgfg_train_config(), crops, out.model, config.digest(),
                                 heldout ? &*heldout : nullptr);
  write_loss_curve(out_dir / "loss.csv", out.result.losses);
  save_config(config, out_dir);
  run.add_artifact(out.model);
  run.add_artifact(out_dir / "loss.csv");
  run.add_artifact(out_dir / "config.cfg");
  if (out.result.heldout_f1) run.environment["heldout_f1"] = *out.result.heldout_f1;
  run.finish(out_dir / "run_manifest.json");
  return out;
}

TrainOutcome train_segmentation(const config::ExperimentConfig& config, const fs::path& out_dir) {
  config.validate();
  if (config.stages.empty()) throw invalid_argument("config key 'stages': no training stage given");
  fs::create_directories(out_dir);
  auto run = config::RunManifest::begin("train --task seg", config.digest());
  std::vector<train::Stage> stages;
  for (const config::StageSpec& s : config.stages) {
    std::string name;
    for (const auto& d : s.datasets) name += (name.empty() ? "" : "+") + d;
    stages.push_back({name, stage_training_set(config, s), s.steps});
  }
  auto net = build_network(config);
  TrainOutcome out;
  out.result = train::train_segmentation(*net, config.seg_train_config(), stages, out_dir, config.digest());
  out.model = out_dir / "model.ckpt";
  fs::copy_file(out.result.checkpoints.back(), out.model, fs::copy_options::overwrite_existing);
  write_loss_curve(out_dir / "loss.csv", out.result.losses);
  save_config(config, out_dir);
  for (const auto& c : out.result.checkpoints) run.add_artifact(c);
  run.add_artifact(out.model);
  run.add_artifact(out_dir / "loss.csv");
  run.add_artifact(out_dir / "config.cfg");
  run.finish(out_dir / "run_manifest.json");
  return out;
}

infer::ModelFactory checkpoint_model_factory(const fs::path& model) {
  if (!fs::exists(model)) throw io_error("model checkpoint " + model.string() + " not found");
  smanet::read_checkpoint_info(model);  // fail early on a bad file
  return [model]() -> std::unique_ptr<infer::ProbabilityModel> {
    return std::make_unique<OwningNetworkModel>(smanet::load_checkpoint(model));
  };
}

weaklabel::GeneratedDataset generate_labels(const config::ExperimentConfig& config, const fs::path& model,
                                            const fs::path& manifest_path, std::optional<ingest::Split> split,
                                            const fs::path& out_dir, const std::string& name) {
  config.validate();
  auto run = config::RunManifest::begin("generate-labels", config.digest());
  ingest::DatasetManifest manifest = ingest::read_manifest(manifest_path);
  if (split) manifest = only_split(std::move(manifest), *split);
  const auto factory = checkpoint_model_factory(model);
  weaklabel::GeneratedDataset g =
      weaklabel::generate_dataset(manifest, factory, config.labels, out_dir, name, config.workers);
  for (const auto& [id, path] : g.labels) run.add_artifact(path);
  run.add_artifact(g.manifest_path);
  run.environment["failures"] = g.failures;
  run.finish(out_dir / "run_manifest.json");
  return g;
}

std::vector<infer::InferredImage> infer_images(const config::ExperimentConfig& config, const fs::path& model,
                                               const fs::path& images_dir, const fs::path& out_dir) {
  config.validate();
  auto run = config::RunManifest::begin("infer", config.digest());
  const auto images = infer::list_images(images_dir);
  if (images.empty()) throw invalid_argument("no images in " + images_dir.string());
  auto out = infer::infer_directory(checkpoint_model_factory(model), images, out_dir, config.inference, config.workers);
  for (const auto& r : out) {
    run.add_artifact(r.mask);
    run.add_artifact(r.probability);
  }
  run.finish(out_dir / "run_manifest.json");
  return out;
}

}  // namespace weakseg::pipeline
