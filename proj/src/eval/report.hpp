#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/image.hpp"
#include "core/label_io.hpp"
#include "eval/metrics.hpp"

namespace weakseg::eval {

struct ImageScore {
  std::string id;
  PixelCounts counts;
  Metrics metrics;
};

struct EvalResult {
  PixelCounts counts;  // pooled over all images
  Metrics metrics;     // from the pooled counts
  std::vector<ImageScore> images;
  /// Mean of per-image precision, recall and F1 over images with at least
  /// one certain ground-truth pixel.
  Metrics per_image_mean;
};

EvalResult summarize(std::vector<ImageScore> images);

/// Ground-truth files are matched to <stem>.png in `pred_dir`, where stem
/// drops a gt_ prefix or _GT suffix. Without an explicit encoding, indexed
/// PNGs are read as label maps and anything else as nonzero-is-text.
EvalResult evaluate_directory(const std::filesystem::path& pred_dir, const std::filesystem::path& gt_dir,
                              std::optional<GtEncoding> encoding = std::nullopt);

/// Aligned text at `path` and JSON lines next to it (extension .jsonl).
void write_eval_report(const std::filesystem::path& path, const EvalResult& result, bool per_image);

/// One row of a results table: a setup evaluated on one test set.
struct ReportRow {
  std::string setup;
  std::string test_set;
  std::string block;
  std::string baseline;        // empty or equal to setup: no delta
  bool available = true;
  std::string note;            // why the row is unavailable
  Metrics metrics;
  std::optional<Metrics> per_image;
  std::optional<double> delta; // F1 minus baseline F1, percentage points
};

/// Fills `delta` for rows whose baseline row (same test set) is available.
void compute_deltas(std::vector<ReportRow>& rows);

/// One table per test set, in first-seen order, with rows grouped by block.
std::string format_report(const std::vector<ReportRow>& rows);

nlohmann::ordered_json row_to_json(const ReportRow& row);

/// format_report to `path`, one JSON object per row to the .jsonl sibling.
void write_report(const std::filesystem::path& path, const std::vector<ReportRow>& rows);

inline constexpr int kOverlayGutter = 4;
inline constexpr Rgb kGutterColour{255, 255, 255};

/// Input | prediction | ground truth, separated by white gutters; masks in
/// the label-map palette.
RgbImage overlay_panel(const RgbImage& image, const BinaryMask& prediction, const LabelMap& gt);

/// Writes <out_dir>/<stem>_panel.png per image; returns the files written.
std::vector<std::filesystem::path> emit_overlays(const std::vector<std::filesystem::path>& images,
                                                 const std::filesystem::path& pred_dir,
                                                 const std::filesystem::path& gt_dir,
                                                 const std::filesystem::path& out_dir,
                                                 std::optional<GtEncoding> encoding = std::nullopt);

}  // namespace weakseg::eval
