#include "eval/matrix.hpp"

#include <atomic>
#include <thread>

#include "config/pipeline.hpp"
#include "core/error.hpp"
#include "core/log.hpp"

namespace weakseg::eval {

namespace fs = std::filesystem;

EvalResult evaluate_manifest(const infer::ModelFactory& factory, const ingest::DatasetManifest& manifest,
                             const infer::InferencePolicy& policy, int workers) {
  std::vector<const ingest::SampleRecord*> records;
  bool has_test = false;
  for (const auto& r : manifest.records) has_test = has_test || r.split == ingest::Split::kTest;
  for (const auto& r : manifest.records) {
    if (r.missing || !r.gt_path) continue;
    if (has_test && r.split != ingest::Split::kTest) continue;
    records.push_back(&r);
  }
  if (records.empty()) throw invalid_argument("dataset '" + manifest.dataset + "' has no labelled test images");

  std::vector<ImageScore> scores(records.size());
  std::vector<std::string> errors(records.size());
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    auto model = factory();
    for (std::size_t i = next++; i < records.size(); i = next++) {
      const auto& r = *records[i];
      try {
        const RgbImage image = read_rgb(manifest.resolve(r.image_path).string());
        const LabelMap gt = read_ground_truth(manifest.resolve(*r.gt_path).string(), r.gt_encoding);
        const BinaryMask pred = infer::binarize(infer::sliding_window_predict(*model, image, policy), policy.threshold);
        scores[i] = {r.id, accumulate_counts(pred, gt), {}};
        scores[i].metrics = compute_metrics(scores[i].counts);
      } catch (const std::exception& e) {
        errors[i] = r.id + ": " + e.what();
      }
    }
  };
  const int threads = std::clamp<int>(workers, 1, static_cast<int>(records.size()));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (!e.empty()) throw runtime_error(e);
  return summarize(std::move(scores));
}

std::vector<ReportRow> run_experiment_matrix(const std::vector<config::ExperimentConfig>& configs,
                                             const MatrixOptions& options) {
  std::vector<ReportRow> rows;
  for (const config::ExperimentConfig& c : configs) {
    auto unavailable = [&](const std::string& note) {
      log::warn("setup '", c.name, "' unavailable: ", note);
      for (const auto& set : c.test_sets) {
        ReportRow r{c.name, set, c.block, c.baseline, false, note, {}, {}, {}};
        rows.push_back(r);
      }
    };
    fs::path model;
    if (!c.checkpoint.empty()) {
      model = fs::path(c.checkpoint).is_relative() ? c.source_dir / c.checkpoint : fs::path(c.checkpoint);
    } else {
      const fs::path root = fs::path(c.output_root).is_relative() ? c.source_dir / c.output_root : fs::path(c.output_root);
      const fs::path dir = root / pipeline::slug(c.name);
      model = dir / "model.ckpt";
      if (!fs::exists(model) && options.train_missing) {
        try {
          log::info("training setup '", c.name, "'");
          pipeline::train_segmentation(c, dir);
        } catch (const std::exception& e) {
          unavailable(std::string("training failed: ") + e.what());
          continue;
        }
      }
    }
    if (!fs::exists(model)) {
      unavailable("missing checkpoint " + model.string());
      continue;
    }
    infer::ModelFactory factory;
    try {
      factory = pipeline::checkpoint_model_factory(model);
    } catch (const std::exception& e) {
      unavailable(e.what());
      continue;
    }
    for (const std::string& set : c.test_sets) {
      ReportRow row{c.name, set, c.block, c.baseline, true, "", {}, {}, {}};
      try {
        const fs::path manifest = c.dataset_path(set);
        if (!fs::exists(manifest)) throw io_error("missing manifest " + manifest.string());
        const EvalResult r = evaluate_manifest(factory, ingest::read_manifest(manifest), c.inference, c.workers);
        row.metrics = r.metrics;
        if (c.per_image) row.per_image = r.per_image_mean;
        log::info(c.name, " on ", set, ": F1 ", r.metrics.f1);
      } catch (const std::exception& e) {
        row.available = false;
        row.note = e.what();
        log::warn("setup '", c.name, "' on '", set, "' unavailable: ", e.what());
      }
      rows.push_back(row);
    }
  }
  compute_deltas(rows);
  return rows;
}

}  // namespace weakseg::eval
