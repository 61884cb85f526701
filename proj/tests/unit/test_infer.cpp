#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "core/error.hpp"
#include "core/resample.hpp"
#include "infer/network_model.hpp"
#include "infer/predict.hpp"
#include "infer/tiling.hpp"
#include "smanet/network.hpp"
#include "support/tiny_specs.hpp"

using namespace weakseg;
using namespace weakseg::infer;

namespace {

struct ConstantModel : ProbabilityModel {
  double value;
  int calls = 0;
  explicit ConstantModel(double v) : value(v) {}
  Plane predict(const RgbImage& tile) override {
    ++calls;
    return Plane(tile.width, tile.height, value);
  }
};

// Probability = red / 255, pixel by pixel.
struct RedModel : ProbabilityModel {
  Plane predict(const RgbImage& tile) override {
    Plane p(tile.width, tile.height);
    for (int y = 0; y < tile.height; ++y)
      for (int x = 0; x < tile.width; ++x) p.at(x, y) = tile.at(x, y)[0] / 255.0;
    return p;
  }
};

// 3x3 mean of red / 255 with zero padding at the tile border.
struct BlurModel : ProbabilityModel {
  Plane predict(const RgbImage& tile) override {
    Plane p(tile.width, tile.height);
    for (int y = 0; y < tile.height; ++y)
      for (int x = 0; x < tile.width; ++x) {
        double s = 0;
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int xx = x + dx, yy = y + dy;
            if (xx >= 0 && yy >= 0 && xx < tile.width && yy < tile.height) s += tile.at(xx, yy)[0];
          }
        p.at(x, y) = s / (9 * 255.0);
      }
    return p;
  }
};

RgbImage random_image(int w, int h, std::mt19937& gen) {
  std::uniform_int_distribution<int> byte(0, 255);
  RgbImage img(w, h);
  for (auto& v : img.pixels) v = static_cast<std::uint8_t>(byte(gen));
  return img;
}

}  // namespace

TEST_CASE("tiling examples") {
  const TilingPlan one = plan_tiling({281, 281}, 281, 281);
  CHECK(one.size() == 1);
  const TilingPlan plan = plan_tiling({500, 400}, 281, 140);
  CHECK(plan.xs == std::vector<int>{0, 140, 219});
  CHECK(plan.ys == std::vector<int>{0, 119});
  CHECK(plan.size() == 6);
  const TilingPlan small = plan_tiling({100, 50}, 281, 140);
  CHECK(small.size() == 1);
  CHECK(small.windows()[0] == PixelRect{0, 0, 281, 281});
  CHECK_THROWS_AS(plan_tiling({100, 100}, 50, 60), Error);
  CHECK_THROWS_AS(plan_tiling({100, 100}, 0, 1), Error);
  CHECK_THROWS_AS(plan_tiling({0, 100}, 10, 5), Error);
}

TEST_CASE("tiling covers every pixel for random sizes") {
  std::mt19937 gen(12);
  std::uniform_int_distribution<int> extent(1, 700), win(8, 300);
  for (int trial = 0; trial < 100; ++trial) {
    const Size size{extent(gen), extent(gen)};
    const int window = win(gen);
    const int stride = std::uniform_int_distribution<int>(1, window)(gen);
    const TilingPlan plan = plan_tiling(size, window, stride);
    const Raster<int> counts = coverage_counts(plan);
    CHECK(*std::min_element(counts.data().begin(), counts.data().end()) >= 1);
    for (const PixelRect& w : plan.windows()) {
      CHECK(w.x >= 0);
      CHECK(w.y >= 0);
      CHECK(w.right() <= std::max(size.width, window));
      CHECK(w.bottom() <= std::max(size.height, window));
    }
    // Consecutive origins never jump by more than the stride.
    for (std::size_t i = 1; i < plan.xs.size(); ++i) CHECK(plan.xs[i] - plan.xs[i - 1] <= stride);
  }
}

TEST_CASE("coverage counts for stride = window / 2") {
  const int window = 16, stride = 8;
  for (int m : {2, 3, 5}) {
    const Size size{m * stride, (m + 1) * stride};
    const Raster<int> counts = coverage_counts(plan_tiling(size, window, stride));
    auto axis = [&](int v, int extent) { return (v < stride || v >= extent - stride) ? 1 : 2; };
    for (int y = 0; y < size.height; ++y)
      for (int x = 0; x < size.width; ++x) CHECK(counts.at(x, y) == axis(x, size.width) * axis(y, size.height));
  }
}

TEST_CASE("constant model gives a constant map for any tiling and scale set") {
  std::mt19937 gen(5);
  for (int trial = 0; trial < 20; ++trial) {
    const RgbImage img = random_image(std::uniform_int_distribution<int>(5, 90)(gen),
                                      std::uniform_int_distribution<int>(5, 90)(gen), gen);
    InferencePolicy policy;
    policy.window = std::uniform_int_distribution<int>(4, 40)(gen);
    policy.stride = std::uniform_int_distribution<int>(1, policy.window)(gen);
    policy.scales = {0.75, 1.0, 1.25};
    ConstantModel model(0.37);
    const Plane p = sliding_window_predict(model, img, policy);
    CHECK(p.size() == img.size());
    for (double v : p.data()) CHECK(std::abs(v - 0.37) < 1e-6);
  }
}

TEST_CASE("pointwise model at scale 1 reproduces the per-window paste") {
  std::mt19937 gen(9);
  const RgbImage img = random_image(64, 48, gen);
  InferencePolicy policy;
  policy.scales = {1.0};
  for (auto [w, s] : {std::pair{16, 16}, std::pair{16, 5}, std::pair{100, 50}}) {
    policy.window = w;
    policy.stride = s;
    RedModel model;
    const Plane p = sliding_window_predict(model, img, policy);
    for (int y = 0; y < 48; ++y)
      for (int x = 0; x < 64; ++x) CHECK(p.at(x, y) == doctest::Approx(img.at(x, y)[0] / 255.0).epsilon(1e-12));
  }
}

TEST_CASE("window fusion is order invariant and bounded") {
  std::mt19937 gen(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Size size{37, 29};
  const TilingPlan plan = plan_tiling(size, 12, 5);
  auto windows = plan.windows();
  std::vector<Plane> preds;
  for (const PixelRect& w : windows) {
    Plane p(w.w, w.h);
    for (double& v : p.data()) v = u(gen);
    preds.push_back(p);
  }
  const Plane mean = fuse_windows(size, windows, preds, Fusion::kMean);
  const Plane max = fuse_windows(size, windows, preds, Fusion::kMax);
  std::vector<std::size_t> order(windows.size());
  std::iota(order.begin(), order.end(), 0);
  for (int trial = 0; trial < 10; ++trial) {
    std::shuffle(order.begin(), order.end(), gen);
    std::vector<PixelRect> w2;
    std::vector<Plane> p2;
    for (std::size_t i : order) {
      w2.push_back(windows[i]);
      p2.push_back(preds[i]);
    }
    const Plane m2 = fuse_windows(size, w2, p2, Fusion::kMean);
    for (std::size_t i = 0; i < m2.data().size(); ++i) CHECK(std::abs(m2.data()[i] - mean.data()[i]) < 1e-6);
    CHECK(fuse_windows(size, w2, p2, Fusion::kMax) == max);
  }
  // Mean lies between the smallest and largest window value at every pixel.
  for (int y = 0; y < size.height; ++y)
    for (int x = 0; x < size.width; ++x) {
      double lo = 1.0, hi = 0.0;
      for (std::size_t i = 0; i < windows.size(); ++i) {
        if (!windows[i].contains(x, y)) continue;
        const double v = preds[i].at(x - windows[i].x, y - windows[i].y);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      CHECK(mean.at(x, y) >= lo - 1e-12);
      CHECK(mean.at(x, y) <= hi + 1e-12);
      CHECK(max.at(x, y) == hi);
    }
}

TEST_CASE("translating by one stride translates the interior output") {
  std::mt19937 gen(4);
  const int stride = 8, window = 16, width = 80, height = 40;
  const RgbImage big = random_image(width + stride, height, gen);
  const RgbImage a = big.crop(0, 0, width, height);
  const RgbImage b = big.crop(stride, 0, width, height);
  InferencePolicy policy;
  policy.scales = {1.0};
  policy.window = window;
  policy.stride = stride;
  BlurModel model;
  const Plane pa = sliding_window_predict(model, a, policy);
  const Plane pb = sliding_window_predict(model, b, policy);
  for (int y = 0; y < height; ++y)
    for (int x = window; x < width - window - stride; ++x) CHECK(pb.at(x, y) == doctest::Approx(pa.at(x + stride, y)).epsilon(1e-12));
}

TEST_CASE("images smaller than the window are padded") {
  std::mt19937 gen(2);
  const RgbImage img = random_image(20, 12, gen);
  InferencePolicy policy;
  policy.scales = {1.0};
  policy.window = 32;
  policy.stride = 16;
  RedModel model;
  const Plane p = sliding_window_predict(model, img, policy);
  CHECK(p.size() == img.size());
  CHECK(p.at(19, 11) == doctest::Approx(img.at(19, 11)[0] / 255.0));
}

TEST_CASE("binarize is a strict comparison") {
  Plane half(4, 4, 0.5);
  const BinaryMask none = binarize(half, 0.5);
  for (auto v : none.data()) CHECK(v == 0);
  Plane p(3, 1, 0.0);
  p.at(1, 0) = 1e-9;
  p.at(2, 0) = 1.0;
  const BinaryMask m = binarize(p, 0.0);
  CHECK(m.at(0, 0) == 0);
  CHECK(m.at(1, 0) == 1);
  CHECK(m.at(2, 0) == 1);
  std::mt19937 gen(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Plane r(31, 17);
  for (double& v : r.data()) v = u(gen);
  for (double t : {0.0, 0.25, 0.5, 0.9, 1.0}) {
    const BinaryMask b = binarize(r, t);
    for (std::size_t i = 0; i < r.data().size(); ++i) CHECK(b.data()[i] == (r.data()[i] > t ? 1 : 0));
  }
}

TEST_CASE("probability quantisation") {
  Plane p(3, 1);
  p.at(0, 0) = 0.0;
  p.at(1, 0) = 0.5;
  p.at(2, 0) = 1.0;
  const auto q = quantize_probability(p);
  CHECK(q.at(0, 0) == 0);
  CHECK(q.at(1, 0) == 32768);
  CHECK(q.at(2, 0) == 65535);
}

TEST_CASE("policy validation") {
  InferencePolicy policy;
  CHECK_NOTHROW(policy.validate());
  policy.scales.clear();
  CHECK_THROWS_AS(policy.validate(), Error);
  policy = InferencePolicy{};
  policy.threshold = 1.5;
  CHECK_THROWS_AS(policy.validate(), Error);
  CHECK(fusion_from_string("max") == Fusion::kMax);
  CHECK_THROWS_AS(fusion_from_string("median"), Error);
}

TEST_CASE("network adapter yields probabilities at tile size") {
  auto net = smanet::build_network(weakseg::testing::tiny_spec(), 3);
  NetworkModel model(*net);
  std::mt19937 gen(8);
  InferencePolicy policy;
  policy.scales = {1.0, 0.5};
  policy.window = 32;
  policy.stride = 16;
  const Plane p = sliding_window_predict(model, random_image(45, 38, gen), policy);
  CHECK(p.size() == Size{45, 38});
  for (double v : p.data()) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("resampling helpers") {
  Raster<std::uint8_t> labels(4, 4, 0);
  labels.at(1, 1) = 255;
  labels.at(2, 2) = 1;
  const auto up = resize_nearest(labels, {9, 7});
  for (auto v : up.data()) CHECK((v == 0 || v == 1 || v == 255));
  Plane ramp(4, 1);
  for (int x = 0; x < 4; ++x) ramp.at(x, 0) = x;
  const Plane down = resize_bilinear(ramp, {2, 1});
  CHECK(down.at(0, 0) == doctest::Approx(0.5));
  CHECK(down.at(1, 0) == doctest::Approx(2.5));
  CHECK(scaled_extent(281, 0.75) == 211);
}
