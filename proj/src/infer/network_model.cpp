#include "infer/network_model.hpp"

namespace weakseg::infer {

NetworkModel::NetworkModel(smanet::SegmentationNetwork& network) : network_(network) {}

Plane NetworkModel::predict(const RgbImage& tile) {
  network_.set_training(false);
  nn::NoGradGuard guard;
  nn::Var input(smanet::image_to_tensor(tile.pixels, tile.width, tile.height));
  return smanet::foreground_probability(network_.forward(input).value());
}

}  // namespace weakseg::infer
