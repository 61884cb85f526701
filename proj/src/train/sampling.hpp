#pragma once

#include <vector>

#include "core/image.hpp"
#include "core/label_map.hpp"
#include "nn/rng.hpp"
#include "nn/tensor.hpp"

namespace weakseg::train {

struct TrainingPair {
  RgbImage image;
  LabelMap label;
};

/// Random scale from `scales` applied to image (bilinear) and label (nearest),
/// then a random crop_size x crop_size window. Short sides are padded with the
/// mean colour in the image and UNCERTAIN in the label. With
/// `fit_min_side`, the pair is first resized so its shorter side equals
/// crop_size, keeping the aspect ratio.
TrainingPair sample_training_crop(const RgbImage& image, const LabelMap& label, int crop_size,
                                  const std::vector<double>& scales, nn::Rng& rng,
                                  bool fit_min_side = false);

/// Stacks equally sized crops into a normalised (N,3,H,W) batch.
nn::Tensor batch_images(const std::vector<TrainingPair>& batch);

}  // namespace weakseg::train
