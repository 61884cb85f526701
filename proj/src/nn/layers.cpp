#include "nn/layers.hpp"

#include <cmath>

#include "core/error.hpp"

namespace weakseg::nn {

Conv2d::Conv2d(int in_channels, int out_channels, int kernel, ConvOptions options, bool bias,
               Rng& rng)
    : in_channels_(in_channels), out_channels_(out_channels), kernel_(kernel), options_(options) {
  if (in_channels <= 0 || out_channels <= 0 || kernel <= 0) {
    throw invalid_argument("conv: channel and kernel sizes must be positive");
  }
  Tensor w({out_channels, in_channels, kernel, kernel});
  const double stddev = std::sqrt(2.0 / (static_cast<double>(in_channels) * kernel * kernel));
  for (double& v : w.values()) v = rng.normal(0.0, stddev);
  weight_ = register_parameter("weight", std::move(w));
  if (bias) bias_ = register_parameter("bias", Tensor({1, out_channels, 1, 1}, 0.0));
}

Var Conv2d::forward(const Var& x) const { return conv2d(x, weight_, bias_, options_); }

BatchNorm2d::BatchNorm2d(int channels) {
  gamma_ = register_parameter("gamma", Tensor({1, channels, 1, 1}, 1.0));
  beta_ = register_parameter("beta", Tensor({1, channels, 1, 1}, 0.0));
  state_.running_mean = register_buffer("running_mean", Tensor({1, channels, 1, 1}, 0.0));
  state_.running_var = register_buffer("running_var", Tensor({1, channels, 1, 1}, 1.0));
}

Var BatchNorm2d::forward(const Var& x) { return batch_norm(x, gamma_, beta_, state_, training()); }

ConvBnRelu::ConvBnRelu(int in_channels, int out_channels, int kernel, Rng& rng, int stride,
                       int dilation, bool activate)
    : conv_(in_channels, out_channels, kernel,
            ConvOptions{stride, dilation * (kernel - 1) / 2, dilation}, false, rng),
      bn_(out_channels),
      activate_(activate) {
  register_module("conv", conv_);
  register_module("bn", bn_);
}

Var ConvBnRelu::forward(const Var& x) {
  Var y = bn_.forward(conv_.forward(x));
  return activate_ ? relu(y) : y;
}

}  // namespace weakseg::nn
