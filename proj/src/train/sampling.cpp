#include "train/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"
#include "core/resample.hpp"
#include "infer/predict.hpp"
#include "smanet/network.hpp"

namespace weakseg::train {

namespace {

TrainingPair resize_pair(const RgbImage& image, const LabelMap& label, Size size) {
  if (size == image.size()) return {image, label};
  return {resize_bilinear(image, size), LabelMap::from_codes(resize_nearest(label.codes(), size))};
}

}  // namespace

TrainingPair sample_training_crop(const RgbImage& image, const LabelMap& label, int crop_size,
                                  const std::vector<double>& scales, nn::Rng& rng, bool fit_min_side) {
  if (image.size() != label.size()) throw invalid_argument("image and label sizes differ");
  if (crop_size <= 0) throw invalid_argument("crop size must be positive");
  if (scales.empty()) throw invalid_argument("scale set must not be empty");
  if (image.width == 0 || image.height == 0) throw invalid_argument("empty training image");

  double base = 1.0;
  if (fit_min_side) base = static_cast<double>(crop_size) / std::min(image.width, image.height);
  const double scale = base * scales[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(scales.size()) - 1))];
  const Size scaled{scaled_extent(image.width, scale), scaled_extent(image.height, scale)};
  const TrainingPair big = resize_pair(image, label, scaled);

  const int x0 = rng.uniform_int(0, std::max(0, scaled.width - crop_size));
  const int y0 = rng.uniform_int(0, std::max(0, scaled.height - crop_size));
  TrainingPair out{RgbImage(crop_size, crop_size, infer::kPadColour),
                   LabelMap(crop_size, crop_size, Label::kUncertain)};
  const int w = std::min(crop_size, scaled.width), h = std::min(crop_size, scaled.height);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      out.image.set(x, y, big.image.at(x0 + x, y0 + y));
      out.label.set(x, y, big.label.at(x0 + x, y0 + y));
    }
  return out;
}

nn::Tensor batch_images(const std::vector<TrainingPair>& batch) {
  if (batch.empty()) throw invalid_argument("empty batch");
  const int w = batch[0].image.width, h = batch[0].image.height;
  nn::Tensor out(nn::Shape{static_cast<int>(batch.size()), 3, h, w});
  for (std::size_t n = 0; n < batch.size(); ++n) {
    if (batch[n].image.width != w || batch[n].image.height != h) throw invalid_argument("batch sizes differ");
    const nn::Tensor one = smanet::image_to_tensor(batch[n].image.pixels, w, h);
    std::copy(one.values().begin(), one.values().end(), out.plane(static_cast<int>(n), 0));
  }
  return out;
}

}  // namespace weakseg::train
