#pragma once

#include "nn/module.hpp"
#include "nn/ops.hpp"
#include "nn/rng.hpp"

namespace weakseg::nn {

/// Convolution with He-normal initialised weights (std = sqrt(2 / fan_in)).
class Conv2d : public Module {
 public:
  Conv2d(int in_channels, int out_channels, int kernel, ConvOptions options, bool bias, Rng& rng);

  Var forward(const Var& x) const;

  int in_channels() const { return in_channels_; }
  int out_channels() const { return out_channels_; }
  int kernel() const { return kernel_; }
  const ConvOptions& options() const { return options_; }
  const Var& weight() const { return weight_; }

 private:
  int in_channels_, out_channels_, kernel_;
  ConvOptions options_;
  Var weight_;
  Var bias_;
};

class BatchNorm2d : public Module {
 public:
  explicit BatchNorm2d(int channels);
  Var forward(const Var& x);

 private:
  Var gamma_, beta_;
  BatchNormState state_;
};

/// conv -> batch norm -> ReLU, the unit most blocks are built from. The
/// padding keeps "same" resolution for odd kernels at the given dilation.
class ConvBnRelu : public Module {
 public:
  ConvBnRelu(int in_channels, int out_channels, int kernel, Rng& rng, int stride = 1,
             int dilation = 1, bool activate = true);

  Var forward(const Var& x);
  const Conv2d& conv() const { return conv_; }

 private:
  Conv2d conv_;
  BatchNorm2d bn_;
  bool activate_;
};

}  // namespace weakseg::nn
