#include "smanet/encoder.hpp"

#include <string>

namespace weakseg::smanet {

Bottleneck::Bottleneck(int in_channels, int width, int stride, int dilation, nn::Rng& rng)
    : width_(width),
      reduce_(in_channels, width, 1, rng),
      spatial_(width, width, 3, rng, stride, dilation),
      expand_(width, 4 * width, 1, rng, 1, 1, /*activate=*/false) {
  register_module("reduce", reduce_);
  register_module("spatial", spatial_);
  register_module("expand", expand_);
  if (stride != 1 || in_channels != 4 * width) {
    shortcut_ = std::make_unique<nn::ConvBnRelu>(in_channels, 4 * width, 1, rng, stride, 1, false);
    register_module("shortcut", *shortcut_);
  }
}

nn::Var Bottleneck::forward(const nn::Var& x) {
  nn::Var main = expand_.forward(spatial_.forward(reduce_.forward(x)));
  nn::Var skip = shortcut_ ? shortcut_->forward(x) : x;
  return nn::relu(nn::add(main, skip));
}

ResNetEncoder::ResNetEncoder(const NetworkSpec& spec, nn::Rng& rng)
    : output_stride_(spec.output_stride), stem_(3, spec.encoder.base_width, 7, rng, 2) {
  register_module("stem", stem_);
  const int base = spec.encoder.base_width;
  const bool os8 = spec.output_stride == 8;
  const int strides[4] = {1, 2, os8 ? 1 : 2, 1};
  const int dilations[4] = {1, 1, os8 ? 2 : 1, os8 ? 4 : 2};
  int channels = base;
  int stage_out[4] = {0, 0, 0, 0};
  for (int s = 0; s < 4; ++s) {
    const int width = base << s;
    std::vector<std::unique_ptr<Bottleneck>> blocks;
    for (int b = 0; b < spec.encoder.blocks[s]; ++b) {
      auto block = std::make_unique<Bottleneck>(channels, width, b == 0 ? strides[s] : 1,
                                                dilations[s], rng);
      channels = block->out_channels();
      register_module("layer" + std::to_string(s + 1) + "." + std::to_string(b), *block);
      blocks.push_back(std::move(block));
    }
    stages_.push_back(std::move(blocks));
    stage_out[s] = channels;
  }
  deep_channels_ = channels;
  skip_mid_channels_ = os8 ? stage_out[0] : stage_out[1];
  skip_fine_channels_ = os8 ? base : stage_out[0];
}

FeaturePyramid ResNetEncoder::forward(const nn::Var& image) {
  nn::Var half = stem_.forward(image);
  nn::Var x = nn::max_pool2d(half, 3, 2, 1);
  nn::Var stage_out[4];
  for (std::size_t s = 0; s < stages_.size(); ++s) {
    for (auto& block : stages_[s]) x = block->forward(x);
    stage_out[s] = x;
  }
  FeaturePyramid out;
  out.deep = x;
  if (output_stride_ == 8) {
    out.skip_mid = stage_out[0];
    out.skip_fine = half;
  } else {
    out.skip_mid = stage_out[1];
    out.skip_fine = stage_out[0];
  }
  return out;
}

}  // namespace weakseg::smanet
