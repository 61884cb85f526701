#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "core/raster.hpp"
#include "nn/layers.hpp"
#include "smanet/attention.hpp"
#include "smanet/decoder.hpp"
#include "smanet/encoder.hpp"
#include "smanet/network_spec.hpp"

namespace weakseg::smanet {

struct NetworkOutput {
  nn::Var scores;          // (N,classes,H,W) logits at input resolution
  nn::Var attention_maps;  // smanet only: (N,2,H/os,W/os)
};

/// ResNet encoder and PSP context head, then per variant: a classifier
/// (psp_baseline), the decoder (psp_double_decoder), or attention gating
/// followed by the decoder (smanet).
class SegmentationNetwork : public nn::Module {
 public:
  SegmentationNetwork(const NetworkSpec& spec, std::uint64_t seed);

  const NetworkSpec& spec() const { return spec_; }

  /// image: (N,3,H,W) normalised input.
  NetworkOutput forward_detailed(const nn::Var& image);
  nn::Var forward(const nn::Var& image) { return forward_detailed(image).scores; }

  /// Top-level blocks present in this variant, in forward order.
  std::vector<std::string> blocks() const;

  ResNetEncoder& encoder() { return encoder_; }
  MultiscaleAttention* attention() { return attention_.get(); }

 private:
  NetworkSpec spec_;
  nn::Rng rng_;
  ResNetEncoder encoder_;
  std::unique_ptr<MultiscaleAttention> attention_;
  std::unique_ptr<PspHead> psp_;
  std::unique_ptr<Decoder> decoder_;
  std::unique_ptr<nn::Conv2d> classifier_;
};

std::unique_ptr<SegmentationNetwork> build_network(const NetworkSpec& spec, std::uint64_t seed);

/// Per-channel mean and std used to normalise 8-bit RGB input.
nn::Tensor image_to_tensor(const std::vector<std::uint8_t>& rgb, int width, int height);

/// Softmax foreground probability (class 1) of the first batch item.
Plane foreground_probability(const nn::Tensor& scores);

}  // namespace weakseg::smanet
