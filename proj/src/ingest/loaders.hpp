#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include "core/image.hpp"
#include "core/label_map.hpp"
#include "ingest/manifest.hpp"

namespace weakseg::ingest {

/// COCO-Text JSON (anns / imgs / imgToAnns). Boxes without a language tag
/// get script unknown. Missing images are flagged, not dropped.
DatasetManifest load_cocotext(const std::filesystem::path& annotation_file,
                              const std::filesystem::path& image_root,
                              std::optional<Split> only_split = std::nullopt);

/// MLT per-image text files gt_<stem>.txt with lines
/// x1,y1,...,x4,y4,language,transcription; "###" marks an illegible box.
/// Record ids are "<split>/<stem>" so train and val can be merged.
DatasetManifest load_mlt(const std::filesystem::path& gt_dir, const std::filesystem::path& image_root,
                         Split split);

Script script_from_mlt_language(const std::string& language);

enum class PixelGtKind { kIcdar2013, kTotalText, kSynthetic };
const char* to_string(PixelGtKind kind);
PixelGtKind pixel_gt_kind_from_string(const std::string& text);
GtEncoding default_encoding(PixelGtKind kind);

/// Layout: root/{train,test}/images/<stem>.{png,jpg}, masks next to it in
/// root/<split>/masks/ (<stem>, <stem>_GT or gt_<stem>), and optional word
/// boxes in root/<split>/boxes/<stem>.txt.
DatasetManifest load_pixel_gt_dataset(PixelGtKind kind, const std::filesystem::path& root,
                                      std::optional<GtEncoding> encoding = std::nullopt);

/// Word-box text file: one box per line, "x,y,w,h" or eight quad
/// coordinates, optionally followed by the transcription.
std::vector<TextBox> read_box_file(const std::filesystem::path& path);

using BoxPredicate = std::function<bool(const TextBox&)>;

/// Keeps records with at least one box satisfying the predicate. Boxes are
/// left untouched; the failing ones feed the uncertainty rule later.
DatasetManifest select_images(const DatasetManifest& manifest, const BoxPredicate& predicate,
                              const std::string& filter_name = "custom");

/// Concatenates manifests of the same dataset; ids must stay unique.
DatasetManifest merge_manifests(const std::vector<DatasetManifest>& parts, const std::string& name);

struct SynthCrop {
  std::string record_id;
  std::size_t box_index = 0;
  PixelRect rect;
  RgbImage image;
  LabelMap mask;
};

/// Calls `sink` with one crop per word box of every record that has pixel
/// ground truth. Returns the number of crops emitted.
std::size_t extract_synth_crops(const DatasetManifest& manifest, double factor,
                                const std::function<void(SynthCrop&&)>& sink);

std::vector<SynthCrop> extract_synth_crops(const DatasetManifest& manifest, double factor);

}  // namespace weakseg::ingest
