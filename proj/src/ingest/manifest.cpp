#include "ingest/manifest.hpp"

#include <fstream>
#include <set>

#include "core/error.hpp"

namespace weakseg::ingest {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {
constexpr int kManifestVersion = 1;
}

const char* to_string(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "train";
}

Split split_from_string(const std::string& text) {
  if (text == "train") return Split::kTrain;
  if (text == "val") return Split::kVal;
  if (text == "test") return Split::kTest;
  throw format_error("unknown split '" + text + "'");
}

fs::path DatasetManifest::resolve(const std::string& path) const {
  const fs::path p(path);
  return p.is_absolute() || root.empty() ? p : fs::path(root) / p;
}

void DatasetManifest::validate() const {
  std::set<std::string> ids;
  for (const SampleRecord& r : records) {
    if (!ids.insert(r.id).second) throw format_error("duplicate record id '" + r.id + "' in " + dataset);
  }
}

std::size_t DatasetManifest::count(Split split) const {
  std::size_t n = 0;
  for (const SampleRecord& r : records) n += r.split == split;
  return n;
}

ordered_json box_to_json(const TextBox& box) {
  ordered_json j;
  if (const auto* r = std::get_if<Rect>(&box.geometry)) {
    j["rect"] = {r->x, r->y, r->w, r->h};
  } else {
    const Quad& q = std::get<Quad>(box.geometry);
    j["quad"] = {q[0].x, q[0].y, q[1].x, q[1].y, q[2].x, q[2].y, q[3].x, q[3].y};
  }
  j["legible"] = box.legible;
  j["machine_printed"] = box.machine_printed;
  j["script"] = to_string(box.script);
  if (box.transcription) j["text"] = *box.transcription;
  return j;
}

TextBox box_from_json(const json& j) {
  TextBox box;
  if (j.contains("rect")) {
    const auto v = j.at("rect").get<std::vector<double>>();
    if (v.size() != 4) throw format_error("rect needs 4 numbers");
    box.geometry = Rect{v[0], v[1], v[2], v[3]};
  } else {
    const auto v = j.at("quad").get<std::vector<double>>();
    if (v.size() != 8) throw format_error("quad needs 8 numbers");
    box.geometry = Quad{Point{v[0], v[1]}, Point{v[2], v[3]}, Point{v[4], v[5]}, Point{v[6], v[7]}};
  }
  box.legible = j.at("legible").get<bool>();
  box.machine_printed = j.at("machine_printed").get<bool>();
  box.script = script_from_string(j.at("script").get<std::string>());
  if (j.contains("text")) box.transcription = j.at("text").get<std::string>();
  return box;
}

ordered_json record_to_json(const SampleRecord& r) {
  ordered_json j;
  j["id"] = r.id;
  j["image_path"] = r.image_path;
  if (r.gt_path) {
    j["gt_path"] = *r.gt_path;
    j["gt_encoding"] = to_string(r.gt_encoding);
  }
  j["split"] = to_string(r.split);
  j["boxes"] = ordered_json::array();
  for (const TextBox& b : r.boxes) j["boxes"].push_back(box_to_json(b));
  if (r.missing) {
    j["missing"] = true;
    j["note"] = r.note;
  }
  return j;
}

SampleRecord record_from_json(const json& j) {
  SampleRecord r;
  r.id = j.at("id").get<std::string>();
  r.image_path = j.at("image_path").get<std::string>();
  if (j.contains("gt_path")) {
    r.gt_path = j.at("gt_path").get<std::string>();
    r.gt_encoding = gt_encoding_from_string(j.value("gt_encoding", "labelmap"));
  }
  r.split = split_from_string(j.at("split").get<std::string>());
  for (const auto& b : j.at("boxes")) r.boxes.push_back(box_from_json(b));
  r.missing = j.value("missing", false);
  r.note = j.value("note", "");
  return r;
}

void write_manifest(const fs::path& path, const DatasetManifest& manifest) {
  manifest.validate();
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw io_error("cannot write manifest " + tmp.string());
    ordered_json header;
    header["weakseg_manifest"] = kManifestVersion;
    header["dataset"] = manifest.dataset;
    header["root"] = manifest.root;
    header["filters"] = manifest.filters;
    header["records"] = manifest.records.size();
    out << header.dump() << '\n';
    for (const SampleRecord& r : manifest.records) out << record_to_json(r).dump() << '\n';
    if (!out.flush()) throw io_error("failed writing manifest " + tmp.string());
  }
  fs::rename(tmp, path);
}

DatasetManifest read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open manifest " + path.string());
  DatasetManifest m;
  std::string line;
  std::size_t line_no = 0;
  std::size_t expected = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      if (!have_header) {
        if (j.value("weakseg_manifest", 0) != kManifestVersion) throw format_error("missing manifest header");
        m.dataset = j.at("dataset").get<std::string>();
        m.root = j.at("root").get<std::string>();
        m.filters = j.value("filters", json::object());
        expected = j.value("records", std::size_t{0});
        have_header = true;
        continue;
      }
      m.records.push_back(record_from_json(j));
    } catch (const json::exception& e) {
      throw format_error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw format_error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!have_header) throw format_error(path.string() + ": empty manifest");
  if (m.records.size() != expected) {
    throw format_error(path.string() + ": header announces " + std::to_string(expected) +
                       " records, found " + std::to_string(m.records.size()));
  }
  m.validate();
  return m;
}

}  // namespace weakseg::ingest
