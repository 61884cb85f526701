#include "weaklabel/weaklabel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "core/error.hpp"
#include "core/label_io.hpp"
#include "core/log.hpp"
#include "core/resample.hpp"

namespace weakseg::weaklabel {

namespace fs = std::filesystem;

void ThresholdPolicy::validate() const {
  if (!(th1 >= 0.0 && th1 <= th2 && th2 <= 1.0)) {
    throw invalid_argument("thresholds must satisfy 0 <= th1 <= th2 <= 1");
  }
}

std::optional<BoxPatch> predict_box_probability(infer::ProbabilityModel& model, const RgbImage& image,
                                                const TextBox& box, const BoxPredictionOptions& options) {
  box.validate();
  const PixelRect rect = enlarge_box(box.covering_rect(), options.enlarge, image.size());
  if (rect.w < 2 || rect.h < 2) {
    log::warn("skipping box smaller than 2x2 after clamping (", rect.w, "x", rect.h, ")");
    return std::nullopt;
  }
  const RgbImage crop = image.crop(rect.x, rect.y, rect.w, rect.h);
  RgbImage input = crop;
  if (options.min_side > 0) {
    const double s = static_cast<double>(options.min_side) / std::min(rect.w, rect.h);
    input = resize_bilinear(crop, {scaled_extent(rect.w, s), scaled_extent(rect.h, s)});
  }
  Plane prob = options.sliding_window ? infer::sliding_window_predict(model, input, options.policy)
                                      : model.predict(input);
  if (!(prob.size() == input.size())) throw runtime_error("model returned a plane of the wrong size");
  prob = resize_bilinear(prob, crop.size());
  for (double& v : prob.data()) v = std::clamp(v, 0.0, 1.0);
  return BoxPatch{rect, std::move(prob)};
}

void fuse_probabilities(ProbabilityCanvas& canvas, const BoxPatch& patch) {
  canvas.fuse(patch.prob, patch.rect.x, patch.rect.y);
}

LabelMap threshold_canvas(const ProbabilityCanvas& canvas, const ThresholdPolicy& policy) {
  policy.validate();
  LabelMap labels(canvas.size());
  const Size s = canvas.size();
  for (int y = 0; y < s.height; ++y) {
    for (int x = 0; x < s.width; ++x) {
      if (!canvas.touched(x, y)) continue;
      const double p = canvas.prob(x, y);
      labels.set(x, y, p < policy.th1 ? Label::kBackground : p > policy.th2 ? Label::kForeground : Label::kUncertain);
    }
  }
  return labels;
}

LabelMap apply_uncertainty_boxes(LabelMap labels, const std::vector<TextBox>& boxes) {
  for (const TextBox& box : boxes) {
    if (is_qualifying(box)) continue;
    BinaryMask inside;
    try {
      inside = rasterize_box(box, labels.size());
    } catch (const Error& e) {
      log::warn("ignoring unusable uncertainty box: ", e.what());
      continue;
    }
    for (int y = 0; y < labels.height(); ++y)
      for (int x = 0; x < labels.width(); ++x)
        if (inside.at(x, y)) labels.set(x, y, Label::kUncertain);
  }
  return labels;
}

LabelMap label_image(infer::ProbabilityModel& model, const RgbImage& image,
                     const std::vector<TextBox>& boxes, const LabelOptions& options) {
  ProbabilityCanvas canvas(image.size());
  for (const TextBox& box : boxes) {
    if (!is_qualifying(box)) continue;
    std::optional<BoxPatch> patch;
    try {
      patch = predict_box_probability(model, image, box, options.box);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kInvalidArgument) throw;
      log::warn("skipping box: ", e.what());
    }
    if (patch) fuse_probabilities(canvas, *patch);
  }
  return apply_uncertainty_boxes(threshold_canvas(canvas, options.thresholds), boxes);
}

GeneratedDataset generate_dataset(const ingest::DatasetManifest& manifest, const ModelFactory& factory,
                                  const LabelOptions& options, const fs::path& out_dir,
                                  const std::string& name, int workers) {
  options.thresholds.validate();
  options.box.policy.validate();
  const fs::path label_dir = out_dir / "labels";
  fs::create_directories(label_dir);

  const std::size_t n = manifest.records.size();
  std::vector<std::optional<std::string>> written(n);
  std::vector<std::string> errors(n);
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;

  auto work = [&]() {
    std::unique_ptr<infer::ProbabilityModel> model = factory();
    for (std::size_t i = next++; i < n; i = next++) {
      const ingest::SampleRecord& r = manifest.records[i];
      try {
        if (r.missing) throw io_error("image flagged missing at ingest: " + r.note);
        const RgbImage image = read_rgb(manifest.resolve(r.image_path).string());
        const LabelMap labels = label_image(*model, image, r.boxes, options);
        const fs::path path = label_dir / (r.id + ".png");
        write_label_map(path.string(), labels);
        written[i] = path.string();
      } catch (const std::exception& e) {
        errors[i] = e.what();
        std::lock_guard lock(log_mutex);
        log::error("label generation failed for ", r.id, ": ", e.what());
      }
    }
  };
  const int threads = std::max(1, std::min<int>(workers, static_cast<int>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }

  GeneratedDataset out;
  out.name = name;
  ingest::DatasetManifest generated;
  generated.dataset = name;
  generated.root = manifest.root;
  generated.filters = manifest.filters;
  generated.filters["th1"] = options.thresholds.th1;
  generated.filters["th2"] = options.thresholds.th2;
  for (std::size_t i = 0; i < n; ++i) {
    const ingest::SampleRecord& r = manifest.records[i];
    if (!written[i]) {
      out.failures.push_back(r.id + ": " + errors[i]);
      continue;
    }
    out.labels.emplace_back(r.id, *written[i]);
    ingest::SampleRecord g = r;
    g.image_path = fs::absolute(manifest.resolve(r.image_path)).string();
    g.gt_path = fs::absolute(*written[i]).string();
    g.gt_encoding = GtEncoding::kLabelMap;
    generated.records.push_back(std::move(g));
  }
  out.manifest_path = out_dir / "manifest.jsonl";
  ingest::write_manifest(out.manifest_path, generated);
  log::info(name, ": generated ", out.labels.size(), " label maps, ", out.failures.size(), " failures");
  return out;
}

}  // namespace weakseg::weaklabel
