#pragma once

#include <filesystem>
#include <vector>

#include "config/experiment.hpp"
#include "eval/report.hpp"
#include "infer/batch.hpp"
#include "ingest/manifest.hpp"

namespace weakseg::eval {

struct MatrixOptions {
  bool train_missing = true;  // train setups whose model checkpoint does not exist yet
};

/// Pooled (and per-image) scores of a model on the test split of a manifest;
/// a manifest without test records is evaluated whole.
EvalResult evaluate_manifest(const infer::ModelFactory& factory, const ingest::DatasetManifest& manifest,
                             const infer::InferencePolicy& policy, int workers = 1);

/// One row per setup and test set. A setup's model is its `checkpoint` key,
/// else <output_root>/<slug>/model.ckpt, trained first if missing and
/// allowed. Anything missing marks the row unavailable; the run goes on.
std::vector<ReportRow> run_experiment_matrix(const std::vector<config::ExperimentConfig>& configs,
                                             const MatrixOptions& options = {});

}  // namespace weakseg::eval
