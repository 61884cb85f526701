#pragma once

#include <vector>

#include "nn/autograd.hpp"

namespace weakseg::nn {

struct ConvOptions {
  int stride = 1;
  int padding = 0;
  int dilation = 1;
};

int conv_output_extent(int input, int kernel, const ConvOptions& options);

/// x (N,C,H,W) * weight (O,C,k,k) [+ bias (1,O,1,1)].
Var conv2d(const Var& x, const Var& weight, const Var& bias, const ConvOptions& options);

struct BatchNormState {
  Var running_mean;  // (1,C,1,1)
  Var running_var;   // (1,C,1,1)
  double momentum = 0.1;
  double eps = 1e-5;
};

/// Training mode normalises with batch statistics and updates the running
/// estimates in place; evaluation mode uses the running estimates.
Var batch_norm(const Var& x, const Var& gamma, const Var& beta, BatchNormState& state,
               bool training);

Var relu(const Var& x);
Var max_pool2d(const Var& x, int kernel, int stride, int padding);
Var add(const Var& a, const Var& b);
Var concat_channels(const std::vector<Var>& parts);
Var slice_channels(const Var& x, int begin, int count);
/// x (N,C,H,W) scaled per pixel by gate (N,1,H,W).
Var mul_channel_broadcast(const Var& x, const Var& gate);
/// Half-pixel-centre bilinear resampling (no corner alignment).
Var resize_bilinear(const Var& x, int out_h, int out_w);
/// Average over a bins x bins grid of cells; cell i spans
/// [floor(i*H/bins), ceil((i+1)*H/bins)).
Var adaptive_avg_pool(const Var& x, int bins);
Var softmax_channels(const Var& x);
/// sum(x * weights) as a (1,1,1,1) scalar.
Var weighted_sum(const Var& x, const Tensor& weights);

/// Value-only resize used by preprocessing code outside the tape.
Tensor resize_bilinear(const Tensor& x, int out_h, int out_w);

}  // namespace weakseg::nn
