#include "eval/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "core/error.hpp"
#include "core/log.hpp"
#include "infer/batch.hpp"

namespace weakseg::eval {

namespace fs = std::filesystem;

namespace {

// Ground-truth naming conventions: <stem>, <stem>_GT, gt_<stem>.
std::string gt_key(const fs::path& path) {
  std::string stem = path.stem().string();
  if (stem.size() > 3 && stem.rfind("gt_", 0) == 0) return stem.substr(3);
  if (stem.size() > 3 && stem.compare(stem.size() - 3, 3, "_GT") == 0) return stem.substr(0, stem.size() - 3);
  return stem;
}

std::map<std::string, fs::path> index_ground_truth(const fs::path& gt_dir) {
  std::map<std::string, fs::path> out;
  for (const fs::path& p : infer::list_images(gt_dir)) {
    const std::string key = gt_key(p);
    if (!out.emplace(key, p).second) throw format_error("two ground-truth files for '" + key + "' in " + gt_dir.string());
  }
  return out;
}

LabelMap read_gt(const fs::path& path, std::optional<GtEncoding> encoding) {
  const GtEncoding e = encoding ? *encoding : (is_indexed_png(path.string()) ? GtEncoding::kLabelMap : GtEncoding::kNonZero);
  return read_ground_truth(path.string(), e);
}

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * v);
  return buf;
}

std::string signed_pp(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%+.2f", v);
  return buf;
}

std::string pad(const std::string& s, std::size_t width, bool right) {
  if (s.size() >= width) return s;
  return right ? std::string(width - s.size(), ' ') + s : s + std::string(width - s.size(), ' ');
}

nlohmann::ordered_json metrics_json(const Metrics& m) {
  return {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
}

nlohmann::ordered_json counts_json(const PixelCounts& c) {
  return {{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}, {"tn", c.tn}};
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw io_error("cannot write " + path.string());
  out << text;
  if (!out) throw io_error("cannot write " + path.string());
}

}  // namespace

EvalResult summarize(std::vector<ImageScore> images) {
  EvalResult r;
  std::size_t scored = 0;
  for (const ImageScore& s : images) {
    r.counts += s.counts;
    if (s.counts.total() == 0) continue;
    ++scored;
    r.per_image_mean.precision += s.metrics.precision;
    r.per_image_mean.recall += s.metrics.recall;
    r.per_image_mean.f1 += s.metrics.f1;
  }
  if (scored) {
    r.per_image_mean.precision /= scored;
    r.per_image_mean.recall /= scored;
    r.per_image_mean.f1 /= scored;
  }
  r.metrics = compute_metrics(r.counts);
  r.images = std::move(images);
  return r;
}

EvalResult evaluate_directory(const fs::path& pred_dir, const fs::path& gt_dir, std::optional<GtEncoding> encoding) {
  const auto gt = index_ground_truth(gt_dir);
  if (gt.empty()) throw invalid_argument("no ground-truth images in " + gt_dir.string());
  std::vector<ImageScore> scores;
  for (const auto& [key, gt_path] : gt) {
    const fs::path pred = pred_dir / (key + ".png");
    if (!fs::exists(pred)) throw io_error("no prediction " + pred.string() + " for ground truth " + gt_path.string());
    ImageScore s;
    s.id = key;
    try {
      s.counts = accumulate_counts(read_binary_mask(pred.string()), read_gt(gt_path, encoding));
    } catch (const Error& e) {
      throw Error(e.kind(), key + ": " + e.what());
    }
    s.metrics = compute_metrics(s.counts);
    scores.push_back(s);
  }
  return summarize(std::move(scores));
}

void write_eval_report(const fs::path& path, const EvalResult& r, bool per_image) {
  std::string text;
  auto line = [&](const std::string& k, const std::string& v) { text += pad(k, 15, false) + v + "\n"; };
  line("images", std::to_string(r.images.size()));
  line("pixels", std::to_string(r.counts.total()) + " (uncertain ground truth excluded)");
  line("tp/fp/fn/tn", std::to_string(r.counts.tp) + " / " + std::to_string(r.counts.fp) + " / " +
                          std::to_string(r.counts.fn) + " / " + std::to_string(r.counts.tn));
  line("precision", pct(r.metrics.precision));
  line("recall", pct(r.metrics.recall));
  line("f1", pct(r.metrics.f1));
  std::string jsonl;
  nlohmann::ordered_json summary{{"kind", "summary"}, {"images", r.images.size()}};
  summary["counts"] = counts_json(r.counts);
  summary["pooled"] = metrics_json(r.metrics);
  if (per_image) summary["per_image_mean"] = metrics_json(r.per_image_mean);
  jsonl += summary.dump() + "\n";
  if (per_image) {
    line("mean image f1", pct(r.per_image_mean.f1));
    text += "\n" + pad("image", 24, false) + pad("Precision", 11, true) + pad("Recall", 10, true) +
            pad("F1", 10, true) + "\n";
    for (const ImageScore& s : r.images) {
      text += pad(s.id, 24, false) + pad(pct(s.metrics.precision), 11, true) + pad(pct(s.metrics.recall), 10, true) +
              pad(pct(s.metrics.f1), 10, true) + "\n";
      nlohmann::ordered_json j{{"kind", "image"}, {"id", s.id}};
      j["counts"] = counts_json(s.counts);
      j["metrics"] = metrics_json(s.metrics);
      jsonl += j.dump() + "\n";
    }
  }
  write_file(path, text);
  fs::path side = path;
  side.replace_extension(".jsonl");
  if (side == path) side += ".jsonl";
  write_file(side, jsonl);
}

void compute_deltas(std::vector<ReportRow>& rows) {
  for (ReportRow& r : rows) {
    r.delta.reset();
    if (!r.available || r.baseline.empty() || r.baseline == r.setup) continue;
    for (const ReportRow& b : rows) {
      if (b.setup == r.baseline && b.test_set == r.test_set && b.available) {
        r.delta = relative_delta(r.metrics.f1, b.metrics.f1);
      }
    }
  }
}

std::string format_report(const std::vector<ReportRow>& rows) {
  std::vector<std::string> sets;
  for (const ReportRow& r : rows)
    if (std::find(sets.begin(), sets.end(), r.test_set) == sets.end()) sets.push_back(r.test_set);

  std::string out;
  for (const std::string& set : sets) {
    std::vector<const ReportRow*> table;
    bool per_image = false;
    std::size_t name_width = 5;
    for (const ReportRow& r : rows) {
      if (r.test_set != set) continue;
      table.push_back(&r);
      per_image = per_image || r.per_image.has_value();
      name_width = std::max(name_width, r.setup.size());
    }
    // Rows of the same block stay together, blocks in first-seen order.
    std::vector<std::string> blocks;
    for (const ReportRow* r : table)
      if (std::find(blocks.begin(), blocks.end(), r->block) == blocks.end()) blocks.push_back(r->block);

    std::string header = pad("", name_width + 2, false) + pad("Precision", 10, true) + pad("Recall", 10, true) +
                         pad("F1 Score", 10, true) + pad("Delta F1", 10, true);
    if (per_image) header += pad("Image F1", 10, true);
    const std::string rule(header.size(), '-');
    if (!out.empty()) out += "\n";
    out += "Results on " + set + "\n" + rule + "\n" + header + "\n" + rule + "\n";
    for (const std::string& block : blocks) {
      for (const ReportRow* r : table) {
        if (r->block != block) continue;
        std::string line = pad(r->setup, name_width + 2, false);
        if (!r->available) {
          line += "unavailable";
          if (!r->note.empty()) line += " (" + r->note + ")";
        } else {
          line += pad(pct(r->metrics.precision), 10, true) + pad(pct(r->metrics.recall), 10, true) +
                  pad(pct(r->metrics.f1), 10, true) + pad(r->delta ? signed_pp(*r->delta) : "--", 10, true);
          if (per_image) line += pad(r->per_image ? pct(r->per_image->f1) : "--", 10, true);
        }
        out += line + "\n";
      }
      out += rule + "\n";
    }
  }
  if (!out.empty()) out += "Delta F1: F1 minus the baseline setup's F1, in percentage points.\n";
  return out;
}

nlohmann::ordered_json row_to_json(const ReportRow& r) {
  nlohmann::ordered_json j{{"setup", r.setup}, {"test_set", r.test_set}, {"block", r.block},
                           {"baseline", r.baseline}, {"available", r.available}};
  if (!r.available) {
    j["note"] = r.note;
    return j;
  }
  j["precision"] = r.metrics.precision;
  j["recall"] = r.metrics.recall;
  j["f1"] = r.metrics.f1;
  j["delta_f1_pp"] = r.delta ? nlohmann::ordered_json(*r.delta) : nlohmann::ordered_json(nullptr);
  if (r.per_image) j["per_image"] = metrics_json(*r.per_image);
  return j;
}

void write_report(const fs::path& path, const std::vector<ReportRow>& rows) {
  write_file(path, format_report(rows));
  std::string jsonl;
  for (const ReportRow& r : rows) jsonl += row_to_json(r).dump() + "\n";
  fs::path side = path;
  side.replace_extension(".jsonl");
  if (side == path) side += ".jsonl";
  write_file(side, jsonl);
}

RgbImage overlay_panel(const RgbImage& image, const BinaryMask& prediction, const LabelMap& gt) {
  const Size s = image.size();
  if (prediction.size() != s || gt.size() != s) throw invalid_argument("overlay inputs differ in size");
  RgbImage panel(3 * s.width + 2 * kOverlayGutter, s.height, kGutterColour);
  const auto& pal = label_palette();
  const int x_pred = s.width + kOverlayGutter, x_gt = 2 * (s.width + kOverlayGutter);
  for (int y = 0; y < s.height; ++y)
    for (int x = 0; x < s.width; ++x) {
      panel.set(x, y, image.at(x, y));
      panel.set(x_pred + x, y, pal[prediction.at(x, y) ? 1 : 0]);
      const Label l = gt.at(x, y);
      panel.set(x_gt + x, y, pal[l == Label::kForeground ? 1 : l == Label::kUncertain ? 2 : 0]);
    }
  return panel;
}

std::vector<fs::path> emit_overlays(const std::vector<fs::path>& images, const fs::path& pred_dir,
                                    const fs::path& gt_dir, const fs::path& out_dir,
                                    std::optional<GtEncoding> encoding) {
  const auto gt = index_ground_truth(gt_dir);
  fs::create_directories(out_dir);
  std::vector<fs::path> written;
  for (const fs::path& image_path : images) {
    const std::string stem = image_path.stem().string();
    const auto it = gt.find(stem);
    if (it == gt.end()) throw io_error("no ground truth for " + image_path.string() + " in " + gt_dir.string());
    const RgbImage image = read_rgb(image_path.string());
    const BinaryMask pred = read_binary_mask((pred_dir / (stem + ".png")).string());
    const fs::path out = out_dir / (stem + "_panel.png");
    write_rgb_png(out.string(), overlay_panel(image, pred, read_gt(it->second, encoding)));
    written.push_back(out);
  }
  log::info("wrote ", written.size(), " overlay panels to ", out_dir.string());
  return written;
}

}  // namespace weakseg::eval
