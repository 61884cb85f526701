#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "core/geometry.hpp"
#include "core/image.hpp"
#include "core/label_map.hpp"
#include "infer/predict.hpp"
#include "ingest/manifest.hpp"

namespace weakseg::weaklabel {

/// prob < th1 is background, prob > th2 foreground, anything else uncertain.
struct ThresholdPolicy {
  double th1 = 0.3;
  double th2 = 0.7;
  void validate() const;
  bool operator==(const ThresholdPolicy&) const = default;
};

struct BoxPredictionOptions {
  double enlarge = 0.3;
  int min_side = 185;           // crops are resized to this shorter side; 0 keeps them as is
  bool sliding_window = true;   // false feeds the whole crop to the model in one call
  infer::InferencePolicy policy{{0.75, 1.0, 1.25}, 185, 92, infer::Fusion::kMean, 0.5};
  bool operator==(const BoxPredictionOptions&) const = default;
};

struct LabelOptions {
  ThresholdPolicy thresholds;
  BoxPredictionOptions box;
  bool operator==(const LabelOptions&) const = default;
};

struct BoxPatch {
  PixelRect rect;  // enlarged, clamped box in image coordinates
  Plane prob;      // rect-sized foreground probabilities
};

/// Runs the background-foreground model on the enlarged box. Returns nothing
/// (with a warning) when the clamped box is smaller than 2x2 pixels.
std::optional<BoxPatch> predict_box_probability(infer::ProbabilityModel& model, const RgbImage& image,
                                                const TextBox& box, const BoxPredictionOptions& options);

void fuse_probabilities(ProbabilityCanvas& canvas, const BoxPatch& patch);

/// Untouched pixels are background regardless of their probability.
LabelMap threshold_canvas(const ProbabilityCanvas& canvas, const ThresholdPolicy& policy);

/// Pixels inside boxes that are not legible, machine-printed Latin text
/// become uncertain, overriding whatever was there.
LabelMap apply_uncertainty_boxes(LabelMap labels, const std::vector<TextBox>& boxes);

/// The whole per-image procedure: predict and max-fuse every qualifying
/// box, threshold, then apply the uncertainty override.
LabelMap label_image(infer::ProbabilityModel& model, const RgbImage& image,
                     const std::vector<TextBox>& boxes, const LabelOptions& options);

struct GeneratedDataset {
  std::string name;
  std::vector<std::pair<std::string, std::string>> labels;  // (record id, label map path)
  std::vector<std::string> failures;                        // "id: reason"
  std::filesystem::path manifest_path;
};

using ModelFactory = std::function<std::unique_ptr<infer::ProbabilityModel>()>;

/// Writes out_dir/labels/<id>.png and out_dir/manifest.jsonl, whose records
/// point at the generated label maps. Each worker builds its own model.
/// Failing images are logged and skipped.
GeneratedDataset generate_dataset(const ingest::DatasetManifest& manifest, const ModelFactory& factory,
                                  const LabelOptions& options, const std::filesystem::path& out_dir,
                                  const std::string& name, int workers = 1);

}  // namespace weakseg::weaklabel
