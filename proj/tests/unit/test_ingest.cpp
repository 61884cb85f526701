#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "core/error.hpp"
#include "core/image.hpp"
#include "core/label_io.hpp"
#include "ingest/loaders.hpp"
#include "ingest/manifest.hpp"

using namespace weakseg;
using namespace weakseg::ingest;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "weakseg_test_ingest" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p) << text;
}

TextBox rect_box(double x, double y, double w, double h, bool legible = true, bool printed = true,
                 Script script = Script::kLatin) {
  TextBox b;
  b.geometry = Rect{x, y, w, h};
  b.legible = legible;
  b.machine_printed = printed;
  b.script = script;
  return b;
}

}  // namespace

TEST_CASE("manifest round trip is exact") {
  std::mt19937 gen(3);
  std::uniform_real_distribution<double> u(0.0, 500.0);
  DatasetManifest m;
  m.dataset = "cocotext";
  m.root = "/data/coco";
  m.filters["select"] = "qualifying";
  for (int i = 0; i < 25; ++i) {
    SampleRecord r;
    r.id = "img_" + std::to_string(i);
    r.image_path = "train2014/" + r.id + ".jpg";
    r.split = static_cast<Split>(i % 3);
    if (i % 4 == 0) {
      r.gt_path = "masks/" + r.id + ".png";
      r.gt_encoding = GtEncoding::kNonWhite;
    }
    for (int b = 0; b < i % 5; ++b) {
      TextBox box;
      if (b % 2) {
        box.geometry = Rect{u(gen), u(gen), u(gen) + 1, u(gen) + 1};
      } else {
        box.geometry = Quad{Point{u(gen), u(gen)}, Point{u(gen), u(gen)}, Point{u(gen), u(gen)}, Point{u(gen), u(gen)}};
      }
      box.legible = b % 3 != 0;
      box.machine_printed = b % 2 == 0;
      box.script = static_cast<Script>(b % 3);
      if (b == 1) box.transcription = "caf\xC3\xA9, \"quoted\"";
      r.boxes.push_back(box);
    }
    if (i == 7) {
      r.missing = true;
      r.note = "image file not found";
    }
    m.records.push_back(r);
  }
  const fs::path path = fresh_dir("roundtrip") / "m.jsonl";
  write_manifest(path, m);
  CHECK(read_manifest(path) == m);

  DatasetManifest empty;
  empty.dataset = "x";
  write_manifest(path, empty);
  CHECK(read_manifest(path) == empty);
}

TEST_CASE("manifest errors") {
  const fs::path dir = fresh_dir("manifest_errors");
  DatasetManifest dup;
  dup.dataset = "d";
  dup.records.resize(2);
  dup.records[0].id = dup.records[1].id = "same";
  CHECK_THROWS_AS(write_manifest(dir / "dup.jsonl", dup), Error);

  write_text(dir / "bad.jsonl",
             "{\"weakseg_manifest\":1,\"dataset\":\"d\",\"root\":\"\",\"records\":1}\n{\"id\":\"a\"}\n");
  try {
    read_manifest(dir / "bad.jsonl");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("bad.jsonl:2") != std::string::npos);
  }
  write_text(dir / "short.jsonl", "{\"weakseg_manifest\":1,\"dataset\":\"d\",\"root\":\"\",\"records\":3}\n");
  CHECK_THROWS_AS(read_manifest(dir / "short.jsonl"), Error);
  CHECK_THROWS_AS(read_manifest(dir / "none.jsonl"), Error);
}

TEST_CASE("COCO-Text loader") {
  const fs::path dir = fresh_dir("coco");
  write_rgb_png((dir / "images" / "a.png").string(), RgbImage(8, 8));
  write_rgb_png((dir / "images" / "b.png").string(), RgbImage(8, 8));
  write_text(dir / "ann.json", R"({
    "imgs": {"1": {"file_name": "images/a.png", "set": "train"},
             "2": {"file_name": "images/b.png", "set": "val"},
             "10": {"file_name": "images/gone.png", "set": "train"}},
    "anns": {"100": {"image_id": 1, "bbox": [1, 2, 3, 4], "legibility": "legible",
                     "class": "machine printed", "language": "english", "utf8_string": "EXIT"},
             "101": {"image_id": 1, "bbox": [0, 0, 2, 2], "legibility": "illegible",
                     "class": "machine printed"},
             "102": {"image_id": 2, "bbox": [0, 0, 2, 2], "legibility": "legible",
                     "class": "handwritten", "language": "not english"}},
    "imgToAnns": {"1": [100, 101], "2": [102], "10": []}
  })");
  DatasetManifest m = load_cocotext(dir / "ann.json", dir);
  REQUIRE(m.records.size() == 3);
  CHECK(m.records[0].id == "1");
  CHECK(m.records[2].id == "10");
  CHECK(m.records[2].missing);
  CHECK(m.records[1].split == Split::kVal);
  const TextBox& good = m.records[0].boxes[0];
  CHECK(std::get<Rect>(good.geometry) == Rect{1, 2, 3, 4});
  CHECK(is_qualifying(good));
  CHECK(good.transcription == "EXIT");
  CHECK(m.records[0].boxes[1].script == Script::kUnknown);  // no language tag
  CHECK_FALSE(m.records[0].boxes[1].legible);
  CHECK(m.records[1].boxes[0].script == Script::kNonLatin);
  CHECK_FALSE(m.records[1].boxes[0].machine_printed);

  CHECK(load_cocotext(dir / "ann.json", dir, Split::kVal).records.size() == 1);
  const DatasetManifest selected = select_images(m, is_qualifying, "coco_ts");
  CHECK(selected.records.size() == 1);
  CHECK(selected.records[0].boxes.size() == 2);  // failing box kept

  write_text(dir / "empty.json", "");
  CHECK(load_cocotext(dir / "empty.json", dir).records.empty());

  write_text(dir / "broken.json", R"({"imgs": {"1": {"file_name": "a.png"}},
    "anns": {"555": {"image_id": 1, "bbox": [1, 2], "legibility": "legible", "class": "machine printed"}},
    "imgToAnns": {"1": [555]}})");
  try {
    load_cocotext(dir / "broken.json", dir);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("555") != std::string::npos);
  }
}

TEST_CASE("select_images") {
  DatasetManifest m;
  m.dataset = "d";
  for (int i = 0; i < 3; ++i) {
    SampleRecord r;
    r.id = std::to_string(i);
    if (i > 0) r.boxes.push_back(rect_box(0, 0, 2, 2));
    m.records.push_back(r);
  }
  auto always = [](const TextBox&) { return true; };
  CHECK(select_images(m, always).records.size() == 2);

  // An image whose only legible box is non-Latin fails the qualifying predicate.
  DatasetManifest one;
  SampleRecord r;
  r.id = "x";
  r.boxes = {rect_box(0, 0, 2, 2, true, true, Script::kNonLatin), rect_box(0, 0, 2, 2, false)};
  one.records.push_back(r);
  CHECK(select_images(one, is_qualifying).records.empty());
  SampleRecord ill;
  ill.id = "y";
  ill.boxes = {rect_box(0, 0, 2, 2, false)};
  one.records = {ill};
  CHECK(select_images(one, is_qualifying).records.empty());
  one.records = {r, ill};
  CHECK(select_images(one, always).records == one.records);
}

TEST_CASE("MLT loader") {
  const fs::path dir = fresh_dir("mlt");
  write_rgb_png((dir / "images" / "img_1.png").string(), RgbImage(10, 10));
  write_text(dir / "gt" / "gt_img_1.txt",
             "\xEF\xBB\xBF" "1,1,5,1,5,4,1,4,Latin,Hello, world\n"
             "2,2,6,2,6,6,2,6,Arabic,\xD8\xB3\xD9\x84\xD8\xA7\xD9\x85\n"
             "0,0,3,0,3,3,0,3,Latin,###\n"
             "0,0,3,0,3,3,0,3,Symbols,@\n");
  write_text(dir / "gt" / "gt_img_2.txt", "0,0,3,0,3,3,0,3,Korean,x\n");
  DatasetManifest m = load_mlt(dir / "gt", dir / "images", Split::kVal);
  REQUIRE(m.records.size() == 2);
  const SampleRecord& r = m.records[0];
  CHECK(r.id == "val/img_1");
  CHECK(r.image_path == "img_1.png");
  REQUIRE(r.boxes.size() == 4);
  CHECK(r.boxes[0].is_quad());
  CHECK(r.boxes[0].script == Script::kLatin);
  CHECK(r.boxes[0].transcription == "Hello, world");
  CHECK(r.boxes[1].script == Script::kNonLatin);
  CHECK_FALSE(r.boxes[2].legible);
  CHECK(r.boxes[3].script == Script::kUnknown);
  CHECK(m.records[1].missing);

  CHECK(script_from_mlt_language("Arabic") == Script::kNonLatin);
  CHECK(script_from_mlt_language("Bangla") == Script::kNonLatin);
  CHECK(script_from_mlt_language("Mixed") == Script::kUnknown);

  write_text(dir / "bad" / "gt_img_1.txt", "1,1,5,1,5,4,1,4,Latin,ok\n1,1,oops,1,5,4,1,4,Latin,x\n");
  try {
    load_mlt(dir / "bad", dir / "images", Split::kTrain);
    FAIL("expected an error");
  } catch (const Error& e) {
    const std::string what = e.what();
    CHECK(what.find("gt_img_1.txt:2") != std::string::npos);
  }
}

TEST_CASE("pixel ground-truth loader") {
  const fs::path dir = fresh_dir("pixel");
  for (const char* split : {"train", "test"}) {
    for (int i = 0; i < 2; ++i) {
      const std::string stem = std::string(split) + std::to_string(i);
      write_rgb_png((dir / split / "images" / (stem + ".png")).string(), RgbImage(12, 9));
      BinaryMask mask(12, 9, 0);
      mask.at(3, 3) = 1;
      write_binary_mask((dir / split / "masks" / (stem + "_GT.png")).string(), mask);
    }
  }
  write_text(dir / "train" / "boxes" / "train0.txt", "1,2,3,4,WORD\n0,0,4,0,4,4,0,4\n");
  DatasetManifest m = load_pixel_gt_dataset(PixelGtKind::kTotalText, dir);
  CHECK(m.count(Split::kTrain) == 2);
  CHECK(m.count(Split::kTest) == 2);
  CHECK(m.records[2].gt_path == "test/masks/test0_GT.png");
  CHECK(m.records[0].gt_encoding == GtEncoding::kNonZero);
  const auto& train0 = m.records[0];
  CHECK(train0.id == "train/train0");
  REQUIRE(train0.boxes.size() == 2);
  CHECK(train0.boxes[0].transcription == "WORD");
  CHECK(train0.boxes[1].is_quad());
  CHECK(load_pixel_gt_dataset(PixelGtKind::kIcdar2013, dir).records[0].gt_encoding == GtEncoding::kNonWhite);

  write_binary_mask((dir / "test" / "masks" / "test1_GT.png").string(), BinaryMask(5, 5, 0));
  CHECK_THROWS_WITH_AS(load_pixel_gt_dataset(PixelGtKind::kSynthetic, dir), doctest::Contains("size mismatch"), Error);
}

TEST_CASE("synthetic crop extraction") {
  const fs::path dir = fresh_dir("synth");
  DatasetManifest m;
  m.dataset = "synthetic";
  m.root = dir.string();
  for (int i = 0; i < 2; ++i) {
    RgbImage img(40, 30);
    BinaryMask mask(40, 30, 0);
    for (int y = 0; y < 30; ++y)
      for (int x = 0; x < 40; ++x) {
        img.set(x, y, {static_cast<std::uint8_t>(x), static_cast<std::uint8_t>(y), static_cast<std::uint8_t>(i)});
        mask.at(x, y) = (x + y) % 3 == 0;
      }
    const std::string stem = "s" + std::to_string(i);
    write_rgb_png((dir / (stem + ".png")).string(), img);
    write_binary_mask((dir / (stem + "_m.png")).string(), mask);
    SampleRecord r;
    r.id = stem;
    r.image_path = stem + ".png";
    r.gt_path = stem + "_m.png";
    r.gt_encoding = GtEncoding::kNonZero;
    r.boxes = {rect_box(5, 5, 10, 6), rect_box(0, 0, 20, 10), rect_box(30, 20, 10, 10)};
    m.records.push_back(r);
  }
  const auto crops = extract_synth_crops(m, 0.3);
  REQUIRE(crops.size() == 6);
  for (const SynthCrop& c : crops) {
    CHECK(c.image.size() == c.mask.size());
    CHECK(c.rect.w == c.image.width);
    for (int y = 0; y < c.rect.h; ++y)
      for (int x = 0; x < c.rect.w; ++x) {
        const int gx = c.rect.x + x, gy = c.rect.y + y;
        CHECK(c.image.at(x, y)[0] == gx);
        CHECK(c.image.at(x, y)[1] == gy);
        CHECK((c.mask.at(x, y) == Label::kForeground) == ((gx + gy) % 3 == 0));
      }
  }
  // Clamped at the top-left corner: the enlarge_box clamp rule.
  CHECK(crops[1].rect == enlarge_box({0, 0, 20, 10}, 0.3, {40, 30}));
  CHECK(crops[1].rect == PixelRect{0, 0, 23, 12});
  CHECK(crops[2].rect == enlarge_box({30, 20, 10, 10}, 0.3, {40, 30}));

  m.records[0].boxes.push_back(rect_box(3, 3, 0, 5));
  CHECK(extract_synth_crops(m, 0.3).size() == 6);  // degenerate box skipped
}
