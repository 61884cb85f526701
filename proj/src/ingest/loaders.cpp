#include "ingest/loaders.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "core/error.hpp"
#include "core/log.hpp"

namespace weakseg::ingest {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

std::vector<std::string> split_commas(const std::string& line, std::size_t max_fields) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (out.size() + 1 < max_fields) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) break;
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  out.push_back(line.substr(start));
  return out;
}

double parse_number(const std::string& text) {
  const std::string t = trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != t.size()) throw format_error("not a number: '" + t + "'");
  return v;
}

const std::vector<std::string>& image_extensions() {
  static const std::vector<std::string> exts{".jpg", ".jpeg", ".png", ".JPG", ".JPEG", ".PNG"};
  return exts;
}

bool is_image_file(const fs::path& p) {
  const std::string ext = p.extension().string();
  return std::find(image_extensions().begin(), image_extensions().end(), ext) != image_extensions().end();
}

std::optional<fs::path> find_image(const fs::path& dir, const std::string& stem) {
  for (const std::string& ext : image_extensions()) {
    fs::path p = dir / (stem + ext);
    if (fs::exists(p)) return p;
  }
  return std::nullopt;
}

std::string relative_to(const fs::path& p, const fs::path& root) {
  return fs::relative(p, root).generic_string();
}

}  // namespace

DatasetManifest load_cocotext(const fs::path& annotation_file, const fs::path& image_root,
                              std::optional<Split> only_split) {
  std::ifstream in(annotation_file);
  if (!in) throw io_error("cannot open COCO-Text annotations " + annotation_file.string());
  DatasetManifest m;
  m.dataset = "cocotext";
  m.root = fs::absolute(image_root).lexically_normal().string();
  std::stringstream buffer;
  buffer << in.rdbuf();
  if (trim(buffer.str()).empty()) return m;
  json doc;
  try {
    doc = json::parse(buffer.str());
  } catch (const json::exception& e) {
    throw format_error("COCO-Text annotations are not valid JSON: " + std::string(e.what()));
  }
  const json imgs = doc.value("imgs", json::object());
  const json anns = doc.value("anns", json::object());

  std::map<std::string, std::vector<std::string>> by_image;
  if (doc.contains("imgToAnns")) {
    for (const auto& [img_id, list] : doc.at("imgToAnns").items()) {
      for (const auto& a : list) by_image[img_id].push_back(a.is_string() ? a.get<std::string>() : std::to_string(a.get<long long>()));
    }
  } else {
    for (const auto& [ann_id, a] : anns.items()) {
      if (!a.contains("image_id")) throw format_error("COCO-Text annotation " + ann_id + " has no image_id");
      by_image[std::to_string(a.at("image_id").get<long long>())].push_back(ann_id);
    }
  }

  // Numeric ids sort numerically so manifests are stable and readable.
  std::vector<std::pair<long long, std::string>> ids;
  for (const auto& [img_id, info] : imgs.items()) {
    long long numeric = 0;
    try {
      numeric = std::stoll(img_id);
    } catch (const std::exception&) {
      numeric = 0;
    }
    ids.emplace_back(numeric, img_id);
  }
  std::sort(ids.begin(), ids.end());

  for (const auto& [numeric, img_id] : ids) {
    const json& info = imgs.at(img_id);
    SampleRecord r;
    r.id = img_id;
    try {
      r.image_path = info.at("file_name").get<std::string>();
      const std::string set = info.value("set", "train");
      r.split = set == "val" ? Split::kVal : set == "test" ? Split::kTest : Split::kTrain;
    } catch (const json::exception& e) {
      throw format_error("COCO-Text image " + img_id + ": " + e.what());
    }
    if (only_split && r.split != *only_split) continue;
    for (const std::string& ann_id : by_image[img_id]) {
      if (!anns.contains(ann_id)) throw format_error("COCO-Text image " + img_id + " refers to missing annotation " + ann_id);
      const json& a = anns.at(ann_id);
      try {
        const auto bbox = a.at("bbox").get<std::vector<double>>();
        if (bbox.size() != 4) throw format_error("bbox must have 4 numbers");
        TextBox box;
        box.geometry = Rect{bbox[0], bbox[1], bbox[2], bbox[3]};
        box.legible = a.at("legibility").get<std::string>() == "legible";
        box.machine_printed = a.at("class").get<std::string>() == "machine printed";
        const std::string language = a.value("language", "");
        box.script = language == "english" ? Script::kLatin
                     : language == "not english" ? Script::kNonLatin
                                                 : Script::kUnknown;
        if (a.contains("utf8_string")) box.transcription = a.at("utf8_string").get<std::string>();
        r.boxes.push_back(std::move(box));
      } catch (const std::exception& e) {
        throw format_error("COCO-Text annotation " + ann_id + " (image " + img_id + "): " + e.what());
      }
    }
    if (!fs::exists(image_root / r.image_path)) {
      r.missing = true;
      r.note = "image file not found";
    }
    m.records.push_back(std::move(r));
  }
  m.validate();
  return m;
}

Script script_from_mlt_language(const std::string& language) {
  static const std::set<std::string> non_latin{"arabic", "chinese", "japanese", "korean", "bangla",
                                               "bengali", "hindi", "devanagari"};
  const std::string l = lower(trim(language));
  if (l == "latin") return Script::kLatin;
  if (non_latin.count(l)) return Script::kNonLatin;
  return Script::kUnknown;  // Symbols, Mixed, None and anything unrecognised
}

DatasetManifest load_mlt(const fs::path& gt_dir, const fs::path& image_root, Split split) {
  if (!fs::is_directory(gt_dir)) throw io_error("MLT ground-truth directory not found: " + gt_dir.string());
  DatasetManifest m;
  m.dataset = "mlt";
  m.root = fs::absolute(image_root).lexically_normal().string();
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(gt_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const fs::path& file : files) {
    std::string stem = file.stem().string();
    if (stem.rfind("gt_", 0) == 0) stem = stem.substr(3);
    SampleRecord r;
    r.id = std::string(to_string(split)) + "/" + stem;
    r.split = split;
    std::ifstream in(file);
    if (!in) throw io_error("cannot read " + file.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line = line.substr(3);
      if (trim(line).empty()) continue;
      try {
        const auto fields = split_commas(trim(line), 10);
        if (fields.size() < 10) throw format_error("expected 8 coordinates, a language and a transcription");
        Quad q;
        for (int i = 0; i < 4; ++i) q[i] = Point{parse_number(fields[2 * i]), parse_number(fields[2 * i + 1])};
        TextBox box;
        box.geometry = q;
        box.script = script_from_mlt_language(fields[8]);
        const std::string text = fields[9];
        box.legible = text != "###";
        box.machine_printed = true;
        box.transcription = text;
        r.boxes.push_back(std::move(box));
      } catch (const Error& e) {
        throw format_error(file.string() + ":" + std::to_string(line_no) + ": " + e.what());
      }
    }
    if (auto image = find_image(image_root, stem)) {
      r.image_path = relative_to(*image, image_root);
    } else {
      r.image_path = stem + ".jpg";
      r.missing = true;
      r.note = "image file not found";
    }
    m.records.push_back(std::move(r));
  }
  m.validate();
  return m;
}

const char* to_string(PixelGtKind kind) {
  switch (kind) {
    case PixelGtKind::kIcdar2013: return "icdar2013";
    case PixelGtKind::kTotalText: return "totaltext";
    case PixelGtKind::kSynthetic: return "synthetic";
  }
  return "synthetic";
}

PixelGtKind pixel_gt_kind_from_string(const std::string& text) {
  const std::string l = lower(text);
  if (l == "icdar2013" || l == "icdar-2013") return PixelGtKind::kIcdar2013;
  if (l == "totaltext" || l == "total-text") return PixelGtKind::kTotalText;
  if (l == "synthetic" || l == "synth") return PixelGtKind::kSynthetic;
  throw invalid_argument("unknown pixel-gt dataset kind '" + text + "'");
}

GtEncoding default_encoding(PixelGtKind kind) {
  return kind == PixelGtKind::kIcdar2013 ? GtEncoding::kNonWhite : GtEncoding::kNonZero;
}

std::vector<TextBox> read_box_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot read box file " + path.string());
  std::vector<TextBox> boxes;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      const auto fields = split_commas(trim(line), 9);
      TextBox box;
      box.script = Script::kLatin;
      std::vector<double> numbers;
      std::size_t i = 0;
      for (; i < fields.size() && numbers.size() < 8; ++i) {
        try {
          numbers.push_back(parse_number(fields[i]));
        } catch (const Error&) {
          break;
        }
      }
      if (numbers.size() == 8) {
        box.geometry = Quad{Point{numbers[0], numbers[1]}, Point{numbers[2], numbers[3]},
                            Point{numbers[4], numbers[5]}, Point{numbers[6], numbers[7]}};
      } else if (numbers.size() >= 4) {
        box.geometry = Rect{numbers[0], numbers[1], numbers[2], numbers[3]};
        i = 4;
      } else {
        throw format_error("expected x,y,w,h or eight quad coordinates");
      }
      if (i < fields.size()) {
        std::string text = fields[i];
        for (std::size_t k = i + 1; k < fields.size(); ++k) text += "," + fields[k];
        box.transcription = text;
      }
      boxes.push_back(std::move(box));
    } catch (const Error& e) {
      throw format_error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return boxes;
}

DatasetManifest load_pixel_gt_dataset(PixelGtKind kind, const fs::path& root,
                                      std::optional<GtEncoding> encoding) {
  if (!fs::is_directory(root)) throw io_error("dataset root not found: " + root.string());
  DatasetManifest m;
  m.dataset = to_string(kind);
  m.root = fs::absolute(root).lexically_normal().string();
  const GtEncoding enc = encoding.value_or(default_encoding(kind));
  for (Split split : {Split::kTrain, Split::kTest}) {
    const fs::path split_dir = root / to_string(split);
    const fs::path images = split_dir / "images";
    if (!fs::is_directory(images)) continue;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(images)) {
      if (entry.is_regular_file() && is_image_file(entry.path())) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const fs::path& image : files) {
      const std::string stem = image.stem().string();
      SampleRecord r;
      r.id = std::string(to_string(split)) + "/" + stem;
      r.split = split;
      r.image_path = relative_to(image, root);
      r.gt_encoding = enc;
      std::optional<fs::path> mask;
      for (const std::string& candidate : {stem, stem + "_GT", "gt_" + stem}) {
        if ((mask = find_image(split_dir / "masks", candidate))) break;
      }
      if (!mask) throw io_error("no mask for image " + image.string());
      r.gt_path = relative_to(*mask, root);
      const Size image_size = probe_size(image.string());
      const Size mask_size = probe_size(mask->string());
      if (!(image_size == mask_size)) {
        throw format_error("size mismatch between " + image.string() + " (" +
                           std::to_string(image_size.width) + "x" + std::to_string(image_size.height) +
                           ") and mask " + mask->string() + " (" + std::to_string(mask_size.width) +
                           "x" + std::to_string(mask_size.height) + ")");
      }
      const fs::path boxes = split_dir / "boxes" / (stem + ".txt");
      if (fs::exists(boxes)) r.boxes = read_box_file(boxes);
      m.records.push_back(std::move(r));
    }
  }
  struct Expected {
    std::size_t train, test;
  };
  std::optional<Expected> expected;
  if (kind == PixelGtKind::kIcdar2013) expected = Expected{229, 233};
  if (kind == PixelGtKind::kTotalText) expected = Expected{1255, 300};
  const std::size_t train = m.count(Split::kTrain), test = m.count(Split::kTest);
  if (expected && (train != expected->train || test != expected->test)) {
    log::warn(m.dataset, ": found ", train, " train / ", test, " test images, the published split has ",
              expected->train, " / ", expected->test);
  } else {
    log::info(m.dataset, ": ", train, " train / ", test, " test images");
  }
  m.validate();
  return m;
}

DatasetManifest select_images(const DatasetManifest& manifest, const BoxPredicate& predicate,
                              const std::string& filter_name) {
  DatasetManifest out;
  out.dataset = manifest.dataset;
  out.root = manifest.root;
  out.filters = manifest.filters;
  out.filters["select"] = filter_name;
  for (const SampleRecord& r : manifest.records) {
    if (std::any_of(r.boxes.begin(), r.boxes.end(), predicate)) out.records.push_back(r);
  }
  return out;
}

DatasetManifest merge_manifests(const std::vector<DatasetManifest>& parts, const std::string& name) {
  DatasetManifest out;
  out.dataset = name;
  if (parts.empty()) return out;
  out.root = parts.front().root;
  out.filters = parts.front().filters;
  for (const DatasetManifest& part : parts) {
    for (SampleRecord r : part.records) {
      if (part.root != out.root) r.image_path = part.resolve(r.image_path).string();
      if (part.root != out.root && r.gt_path) r.gt_path = part.resolve(*r.gt_path).string();
      out.records.push_back(std::move(r));
    }
  }
  out.validate();
  return out;
}

std::size_t extract_synth_crops(const DatasetManifest& manifest, double factor,
                                const std::function<void(SynthCrop&&)>& sink) {
  std::size_t emitted = 0;
  for (const SampleRecord& r : manifest.records) {
    if (!r.gt_path) throw invalid_argument("record " + r.id + " has no pixel ground truth");
    if (r.missing) {
      log::warn("skipping missing image ", r.id);
      continue;
    }
    const RgbImage image = read_rgb(manifest.resolve(r.image_path).string());
    const LabelMap gt = read_ground_truth(manifest.resolve(*r.gt_path).string(), r.gt_encoding);
    if (!(gt.size() == image.size())) throw format_error("size mismatch between image and mask of " + r.id);
    const PixelRect frame{0, 0, image.width, image.height};
    for (std::size_t b = 0; b < r.boxes.size(); ++b) {
      PixelRect rect;
      try {
        r.boxes[b].validate();
        const PixelRect covering = r.boxes[b].covering_rect().intersect(frame);
        if (covering.empty()) throw invalid_argument("degenerate box");
        rect = enlarge_box(covering, factor, image.size());
      } catch (const Error& e) {
        log::warn("skipping box ", b, " of ", r.id, ": ", e.what());
        continue;
      }
      SynthCrop crop;
      crop.record_id = r.id;
      crop.box_index = b;
      crop.rect = rect;
      crop.image = image.crop(rect.x, rect.y, rect.w, rect.h);
      crop.mask = LabelMap(rect.w, rect.h);
      for (int y = 0; y < rect.h; ++y)
        for (int x = 0; x < rect.w; ++x) crop.mask.set(x, y, gt.at(rect.x + x, rect.y + y));
      sink(std::move(crop));
      ++emitted;
    }
  }
  return emitted;
}

std::vector<SynthCrop> extract_synth_crops(const DatasetManifest& manifest, double factor) {
  std::vector<SynthCrop> crops;
  extract_synth_crops(manifest, factor, [&](SynthCrop&& c) { crops.push_back(std::move(c)); });
  return crops;
}

}  // namespace weakseg::ingest
