#include "smanet/attention.hpp"

#include <algorithm>
#include <string>

namespace weakseg::smanet {

PyramidPooling::PyramidPooling(int in_channels, const std::vector<int>& bins, nn::Rng& rng)
    : bins_(bins) {
  const int per_bin = bins.empty() ? 0 : std::max(1, in_channels / static_cast<int>(bins.size()));
  for (int b : bins) {
    auto conv = std::make_unique<nn::Conv2d>(in_channels, per_bin, 1, nn::ConvOptions{}, true, rng);
    register_module("bin" + std::to_string(b), *conv);
    projections_.push_back(std::move(conv));
  }
  out_channels_ = in_channels + per_bin * static_cast<int>(bins.size());
}

nn::Var PyramidPooling::forward(const nn::Var& x) {
  const nn::Shape s = x.shape();
  std::vector<nn::Var> parts{x};
  for (std::size_t i = 0; i < bins_.size(); ++i) {
    nn::Var pooled = nn::adaptive_avg_pool(x, bins_[i]);
    nn::Var projected = nn::relu(projections_[i]->forward(pooled));
    parts.push_back(nn::resize_bilinear(projected, s.h, s.w));
  }
  return parts.size() == 1 ? x : nn::concat_channels(parts);
}

AttentionPyramid::AttentionPyramid(int in_channels, int branch_channels,
                                   const std::vector<int>& rates, const std::vector<int>& bins,
                                   nn::Rng& rng)
    : rates_(rates) {
  for (int rate : rates) {
    auto conv = std::make_unique<nn::ConvBnRelu>(in_channels, branch_channels, 3, rng, 1, rate);
    auto pool = std::make_unique<PyramidPooling>(branch_channels, bins, rng);
    register_module("rate" + std::to_string(rate) + ".conv", *conv);
    register_module("rate" + std::to_string(rate) + ".pool", *pool);
    branch_out_channels_ = pool->out_channels();
    out_channels_ += pool->out_channels();
    convs_.push_back(std::move(conv));
    pools_.push_back(std::move(pool));
  }
}

nn::Var AttentionPyramid::forward(const nn::Var& x) {
  std::vector<nn::Var> branches;
  for (std::size_t i = 0; i < convs_.size(); ++i) {
    branches.push_back(pools_[i]->forward(convs_[i]->forward(x)));
  }
  return nn::concat_channels(branches);
}

MultiscaleAttention::MultiscaleAttention(int in_channels, const NetworkSpec& spec, nn::Rng& rng)
    : entry_(in_channels, spec.attention_channels, 3, rng),
      pyramid_(spec.attention_channels, spec.branch_channels, spec.attention_rates, spec.psp_bins, rng),
      fuse_(pyramid_.out_channels(), spec.attention_hidden, 3, rng),
      logits_(spec.attention_hidden, 2, 1, nn::ConvOptions{}, true, rng),
      projection_(in_channels, spec.reduced_channels, 1, rng),
      out_channels_(spec.reduced_channels) {
  register_module("entry", entry_);
  register_module("pyramid", pyramid_);
  register_module("fuse", fuse_);
  register_module("logits", logits_);
  register_module("projection", projection_);
}

AttentionOutput MultiscaleAttention::forward(const nn::Var& features) {
  nn::Var context = fuse_.forward(pyramid_.forward(entry_.forward(features)));
  AttentionOutput out;
  out.maps = nn::softmax_channels(logits_.forward(context));
  out.attended = nn::mul_channel_broadcast(projection_.forward(features),
                                           nn::slice_channels(out.maps, 1, 1));
  return out;
}

PspHead::PspHead(int in_channels, const NetworkSpec& spec, nn::Rng& rng)
    : pooling_(in_channels, spec.psp_bins, rng),
      conv_(pooling_.out_channels(), spec.reduced_channels, 3, rng),
      out_channels_(spec.reduced_channels) {
  register_module("pooling", pooling_);
  register_module("conv", conv_);
}

nn::Var PspHead::forward(const nn::Var& features) { return conv_.forward(pooling_.forward(features)); }

}  // namespace weakseg::smanet
