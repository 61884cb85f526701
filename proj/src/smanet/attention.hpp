#pragma once

#include <memory>
#include <vector>

#include "nn/layers.hpp"
#include "smanet/network_spec.hpp"

namespace weakseg::smanet {

/// Pyramid pooling: the input concatenated with, per bin size, an
/// average-pooled, 1x1-projected and bilinearly upsampled copy.
class PyramidPooling : public nn::Module {
 public:
  PyramidPooling(int in_channels, const std::vector<int>& bins, nn::Rng& rng);
  nn::Var forward(const nn::Var& x);
  int out_channels() const { return out_channels_; }

 private:
  std::vector<int> bins_;
  std::vector<std::unique_ptr<nn::Conv2d>> projections_;
  int out_channels_;
};

/// One dilated 3x3 conv per rate, each followed by pyramid pooling; branch
/// outputs are concatenated along channels at the input resolution.
class AttentionPyramid : public nn::Module {
 public:
  AttentionPyramid(int in_channels, int branch_channels, const std::vector<int>& rates,
                   const std::vector<int>& bins, nn::Rng& rng);
  nn::Var forward(const nn::Var& x);

  int out_channels() const { return out_channels_; }
  int branch_out_channels() const { return branch_out_channels_; }
  const std::vector<int>& rates() const { return rates_; }
  /// Dilated conv of branch i (before batch norm), exposed for inspection.
  const nn::Conv2d& branch_conv(std::size_t i) const { return convs_[i]->conv(); }

 private:
  std::vector<int> rates_;
  std::vector<std::unique_ptr<nn::ConvBnRelu>> convs_;
  std::vector<std::unique_ptr<PyramidPooling>> pools_;
  int out_channels_ = 0;
  int branch_out_channels_ = 0;
};

struct AttentionOutput {
  nn::Var maps;      // (N,2,h,w) softmax pair; channel 1 gates foreground
  nn::Var attended;  // (N,reduced,h,w) projected features times channel 1
};

/// Multiscale attention: entry conv -> dilated pyramid -> fuse conv ->
/// two-map softmax. The maps gate a 1x1 projection of the encoder features.
class MultiscaleAttention : public nn::Module {
 public:
  MultiscaleAttention(int in_channels, const NetworkSpec& spec, nn::Rng& rng);
  AttentionOutput forward(const nn::Var& features);
  /// The 1x1 projection alone, before gating.
  nn::Var project(const nn::Var& features) { return projection_.forward(features); }
  int out_channels() const { return out_channels_; }

 private:
  nn::ConvBnRelu entry_;
  AttentionPyramid pyramid_;
  nn::ConvBnRelu fuse_;
  nn::Conv2d logits_;
  nn::ConvBnRelu projection_;
  int out_channels_;
};

/// Context head of the PSP variants: pyramid pooling then a 3x3 conv to
/// the reduced width.
class PspHead : public nn::Module {
 public:
  PspHead(int in_channels, const NetworkSpec& spec, nn::Rng& rng);
  nn::Var forward(const nn::Var& features);
  int out_channels() const { return out_channels_; }

 private:
  PyramidPooling pooling_;
  nn::ConvBnRelu conv_;
  int out_channels_;
};

}  // namespace weakseg::smanet
