#pragma once

#include <memory>
#include <vector>

#include "nn/layers.hpp"
#include "smanet/network_spec.hpp"

namespace weakseg::smanet {

/// Encoder outputs consumed by the heads and the decoder.
struct FeaturePyramid {
  nn::Var deep;       // deepest features, 1/output_stride of the input
  nn::Var skip_mid;   // 1/(output_stride/2): first decoder skip
  nn::Var skip_fine;  // 1/(output_stride/4): second decoder skip
};

class Bottleneck : public nn::Module {
 public:
  Bottleneck(int in_channels, int width, int stride, int dilation, nn::Rng& rng);
  nn::Var forward(const nn::Var& x);
  int out_channels() const { return 4 * width_; }

 private:
  int width_;
  nn::ConvBnRelu reduce_, spatial_, expand_;
  std::unique_ptr<nn::ConvBnRelu> shortcut_;
};

/// ResNet bottleneck encoder with dilated late stages. Output stride 8
/// dilates stages 3/4 by 2/4; output stride 16 dilates stage 4 by 2.
class ResNetEncoder : public nn::Module {
 public:
  ResNetEncoder(const NetworkSpec& spec, nn::Rng& rng);

  FeaturePyramid forward(const nn::Var& image);

  int deep_channels() const { return deep_channels_; }
  int skip_mid_channels() const { return skip_mid_channels_; }
  int skip_fine_channels() const { return skip_fine_channels_; }

 private:
  int output_stride_;
  nn::ConvBnRelu stem_;
  std::vector<std::vector<std::unique_ptr<Bottleneck>>> stages_;
  int deep_channels_ = 0, skip_mid_channels_ = 0, skip_fine_channels_ = 0;
};

}  // namespace weakseg::smanet
