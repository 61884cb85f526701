#include "smanet/decoder.hpp"

#include <cstdlib>
#include <string>

#include "core/error.hpp"

namespace weakseg::smanet {

DecoderStage::DecoderStage(int in_channels, int skip_in, int skip_out, int out_channels,
                           nn::Rng& rng, int classes)
    : skip_reduce_(skip_in, skip_out, 1, rng),
      first_(in_channels + skip_out, out_channels, 3, rng),
      out_channels_(classes > 0 ? classes : out_channels) {
  register_module("skip", skip_reduce_);
  register_module("conv1", first_);
  if (classes > 0) {
    classifier_ = std::make_unique<nn::Conv2d>(out_channels, classes, 1, nn::ConvOptions{}, true, rng);
    register_module("classifier", *classifier_);
  } else {
    second_ = std::make_unique<nn::ConvBnRelu>(out_channels, out_channels, 3, rng);
    register_module("conv2", *second_);
  }
}

nn::Var DecoderStage::forward(const nn::Var& x, const nn::Var& skip) {
  const nn::Shape xs = x.shape(), ss = skip.shape();
  if (std::abs(2 * xs.h - ss.h) > 1 || std::abs(2 * xs.w - ss.w) > 1) {
    throw invalid_argument("decoder resolution mismatch: stage " + std::to_string(xs.h) + "x" +
                           std::to_string(xs.w) + " cannot be doubled to skip " +
                           std::to_string(ss.h) + "x" + std::to_string(ss.w));
  }
  nn::Var up = nn::resize_bilinear(x, ss.h, ss.w);
  nn::Var y = first_.forward(nn::concat_channels({up, skip_reduce_.forward(skip)}));
  return classifier_ ? classifier_->forward(y) : second_->forward(y);
}

Decoder::Decoder(int in_channels, int skip_mid_channels, int skip_fine_channels,
                 const NetworkSpec& spec, nn::Rng& rng)
    : mid_(in_channels, skip_mid_channels, spec.skip_channels[0], spec.decoder_channels[0], rng),
      fine_(spec.decoder_channels[0], skip_fine_channels, spec.skip_channels[1],
            spec.decoder_channels[1], rng, spec.num_classes) {
  register_module("stage1", mid_);
  register_module("stage2", fine_);
}

nn::Var Decoder::forward(const nn::Var& x, const nn::Var& skip_mid, const nn::Var& skip_fine) {
  return fine_.forward(mid_.forward(x, skip_mid), skip_fine);
}

}  // namespace weakseg::smanet
