#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

#include "core/error.hpp"
#include "core/label_io.hpp"
#include "ingest/manifest.hpp"
#include "support/weaklabel_oracle.hpp"
#include "weaklabel/weaklabel.hpp"

using namespace weakseg;
using namespace weakseg::weaklabel;
using namespace weakseg::testing;
namespace fs = std::filesystem;

namespace {

struct ConstantModel : infer::ProbabilityModel {
  double v;
  explicit ConstantModel(double value) : v(value) {}
  Plane predict(const RgbImage& tile) override { return Plane(tile.width, tile.height, v); }
};

LabelOptions oracle_options() {
  LabelOptions o;
  o.box.min_side = 0;
  o.box.sliding_window = false;
  return o;
}

TextBox rect_box(double x, double y, double w, double h, bool qualifying = true) {
  TextBox b;
  b.geometry = Rect{x, y, w, h};
  b.script = qualifying ? Script::kLatin : Script::kNonLatin;
  return b;
}

}  // namespace

TEST_CASE("three-way thresholds with strict inequalities") {
  ProbabilityCanvas canvas({101, 1});
  Plane p(101, 1);
  for (int i = 0; i <= 100; ++i) p.at(i, 0) = i / 100.0;
  canvas.fuse(p, 0, 0);
  const LabelMap labels = threshold_canvas(canvas, {0.3, 0.7});
  for (int i = 0; i <= 100; ++i) {
    const double v = i / 100.0;
    CHECK(labels.at(i, 0) == oracle_threshold(v, 0.3, 0.7));
  }
  CHECK(labels.at(20, 0) == Label::kBackground);
  CHECK(labels.at(80, 0) == Label::kForeground);
  CHECK(labels.at(50, 0) == Label::kUncertain);
  CHECK(labels.at(30, 0) == Label::kUncertain);
  CHECK(labels.at(70, 0) == Label::kUncertain);

  const LabelMap limit = threshold_canvas(canvas, {0.5, 0.5});
  for (int i = 0; i <= 100; ++i) CHECK((limit.at(i, 0) == Label::kUncertain) == (i == 50));
  const auto h = labels.histogram();
  CHECK(h[0] + h[1] + h[2] == 101);

  CHECK_THROWS_AS(threshold_canvas(canvas, {0.8, 0.2}), Error);
}

TEST_CASE("untouched pixels are background") {
  ProbabilityCanvas canvas({4, 4});
  canvas.fuse(Plane(2, 2, 0.5), 0, 0);
  const LabelMap labels = threshold_canvas(canvas, {0.3, 0.7});
  CHECK(labels.at(0, 0) == Label::kUncertain);
  CHECK(labels.at(3, 3) == Label::kBackground);
  // prob 0 untouched and prob 0 touched both map to background with th1 > 0.
  CHECK(threshold_canvas(ProbabilityCanvas({3, 3}), {0.0, 0.0}).histogram()[0] == 9);
}

TEST_CASE("uncertainty override") {
  LabelMap fg(10, 10, Label::kForeground);
  TextBox quad;
  quad.geometry = Quad{Point{2, 2}, Point{6, 2}, Point{6, 6}, Point{2, 6}};
  quad.script = Script::kNonLatin;
  const LabelMap out = apply_uncertainty_boxes(fg, {quad});
  CHECK(out.histogram()[2] == 16);
  CHECK(out.at(3, 3) == Label::kUncertain);
  CHECK(out.at(7, 7) == Label::kForeground);
  CHECK(apply_uncertainty_boxes(fg, {rect_box(0, 0, 5, 5)}) == fg);
  CHECK(apply_uncertainty_boxes(LabelMap(10, 10), {quad}).histogram()[2] == 16);
}

TEST_CASE("box prediction geometry") {
  ConstantModel zero_logit(0.5);
  RgbImage image(60, 40);
  BoxPredictionOptions o;
  o.policy.scales = {1.0};
  o.policy.window = 64;
  o.policy.stride = 32;
  auto patch = predict_box_probability(zero_logit, image, rect_box(10, 10, 20, 10), o);
  REQUIRE(patch);
  CHECK(patch->rect == enlarge_box({10, 10, 20, 10}, 0.3, {60, 40}));
  CHECK(patch->prob.size() == Size{patch->rect.w, patch->rect.h});
  for (double v : patch->prob.data()) CHECK(v == doctest::Approx(0.5));
  // A sliver at the image edge clamps to 1 pixel wide and is skipped.
  CHECK_FALSE(predict_box_probability(zero_logit, image, rect_box(59.5, 5, 0.5, 10), o).has_value());
}

TEST_CASE("fusion keeps the larger probability and is idempotent") {
  ProbabilityCanvas canvas({8, 8});
  fuse_probabilities(canvas, {{0, 0, 5, 5}, Plane(5, 5, 0.4)});
  fuse_probabilities(canvas, {{2, 2, 5, 5}, Plane(5, 5, 0.9)});
  CHECK(canvas.prob(3, 3) == 0.9);
  CHECK(canvas.prob(1, 1) == 0.4);
  const ProbabilityCanvas once = canvas;
  fuse_probabilities(canvas, {{2, 2, 5, 5}, Plane(5, 5, 0.9)});
  CHECK(canvas == once);
  CHECK_THROWS_AS(fuse_probabilities(canvas, {{6, 6, 5, 5}, Plane(5, 5, 0.9)}), Error);
}

TEST_CASE("per-image labels match the brute-force oracle") {
  std::mt19937 gen(2024);
  BoxBlurModel model;
  const LabelOptions options = oracle_options();
  int with_boxes = 0, with_uncertain = 0, with_fg = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const LabelInstance inst = random_instance(gen);
    const LabelMap got = label_image(model, inst.image, inst.boxes, options);
    const LabelMap want = oracle_labels(inst.image, inst.boxes, 0.3, 0.7, 0.3);
    CHECK(got == want);
    with_boxes += !inst.boxes.empty();
    with_uncertain += got.histogram()[2] > 0;
    with_fg += got.histogram()[1] > 0;
  }
  // The generator actually exercises every branch.
  CHECK(with_boxes > 200);
  CHECK(with_uncertain > 100);
  CHECK(with_fg > 100);
}

TEST_CASE("box order does not change the labels") {
  std::mt19937 gen(77);
  BoxBlurModel model;
  const LabelOptions options = oracle_options();
  for (int trial = 0; trial < 30; ++trial) {
    LabelInstance inst = random_instance(gen);
    const LabelMap reference = label_image(model, inst.image, inst.boxes, options);
    for (int k = 0; k < 5; ++k) {
      std::shuffle(inst.boxes.begin(), inst.boxes.end(), gen);
      CHECK(label_image(model, inst.image, inst.boxes, options) == reference);
    }
  }
}

TEST_CASE("foreground stays inside enlarged qualifying boxes") {
  std::mt19937 gen(5);
  ConstantModel sure(0.95);
  LabelOptions options = oracle_options();
  for (int trial = 0; trial < 50; ++trial) {
    const LabelInstance inst = random_instance(gen);
    const LabelMap labels = label_image(sure, inst.image, inst.boxes, options);
    for (int y = 0; y < 32; ++y)
      for (int x = 0; x < 32; ++x) {
        if (labels.at(x, y) != Label::kForeground) continue;
        bool covered = false;
        for (const TextBox& b : inst.boxes) {
          if (!is_qualifying(b)) continue;
          covered = covered || enlarge_box(b.covering_rect(), 0.3, {32, 32}).contains(x, y);
        }
        CHECK(covered);
      }
  }
}

TEST_CASE("image without qualifying or failing boxes is all background") {
  ConstantModel sure(0.95);
  RgbImage image(16, 16);
  CHECK(label_image(sure, image, {}, oracle_options()) == LabelMap(16, 16));
}

TEST_CASE("dataset generation writes label maps and a manifest") {
  const fs::path dir = fs::temp_directory_path() / "weakseg_test_weaklabel";
  fs::remove_all(dir);
  std::mt19937 gen(11);
  ingest::DatasetManifest m;
  m.dataset = "toy";
  m.root = (dir / "images").string();
  std::vector<LabelInstance> instances;
  for (int i = 0; i < 12; ++i) {
    instances.push_back(random_instance(gen));
    const std::string name = "img" + std::to_string(i) + ".png";
    write_rgb_png((dir / "images" / name).string(), instances.back().image);
    ingest::SampleRecord r;
    r.id = "img" + std::to_string(i);
    r.image_path = name;
    r.boxes = instances.back().boxes;
    m.records.push_back(r);
  }
  ingest::SampleRecord gone;
  gone.id = "gone";
  gone.image_path = "gone.png";
  gone.missing = true;
  m.records.push_back(gone);

  auto factory = [] { return std::make_unique<BoxBlurModel>(); };
  for (int workers : {1, 3}) {
    const fs::path out = dir / ("out" + std::to_string(workers));
    const GeneratedDataset g = generate_dataset(m, factory, oracle_options(), out, "toy_s", workers);
    CHECK(g.labels.size() == 12);
    REQUIRE(g.failures.size() == 1);
    CHECK(g.failures[0].rfind("gone:", 0) == 0);
    for (int i = 0; i < 12; ++i) {
      CHECK(read_label_map(g.labels[i].second) ==
            oracle_labels(instances[i].image, instances[i].boxes, 0.3, 0.7, 0.3));
    }
    const ingest::DatasetManifest back = ingest::read_manifest(g.manifest_path);
    CHECK(back.records.size() == 12);
    CHECK(back.records[0].gt_encoding == GtEncoding::kLabelMap);
    CHECK(fs::exists(back.resolve(*back.records[0].gt_path)));
    CHECK(fs::exists(back.resolve(back.records[0].image_path)));
  }
}
