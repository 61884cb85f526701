#include "smanet/network.hpp"

#include <cmath>

#include "core/error.hpp"

namespace weakseg::smanet {

namespace {

// ImageNet statistics, kept so externally trained encoders see familiar input.
constexpr double kMean[3] = {0.485, 0.456, 0.406};
constexpr double kStd[3] = {0.229, 0.224, 0.225};

}  // namespace

SegmentationNetwork::SegmentationNetwork(const NetworkSpec& spec, std::uint64_t seed)
    : spec_((spec.validate(), spec)), rng_(seed), encoder_(spec_, rng_) {
  register_module("encoder", encoder_);
  // Every variant shares the PSP context head on top of the ResNet; smanet
  // inserts the attention gating between that head and the decoder.
  psp_ = std::make_unique<PspHead>(encoder_.deep_channels(), spec_, rng_);
  register_module("psp", *psp_);
  int context_channels = psp_->out_channels();
  if (spec_.variant == Variant::kSmaNet) {
    attention_ = std::make_unique<MultiscaleAttention>(context_channels, spec_, rng_);
    register_module("attention", *attention_);
    context_channels = attention_->out_channels();
  }
  if (spec_.variant == Variant::kPspBaseline) {
    classifier_ = std::make_unique<nn::Conv2d>(context_channels, spec_.num_classes, 1,
                                               nn::ConvOptions{}, true, rng_);
    register_module("classifier", *classifier_);
  } else {
    decoder_ = std::make_unique<Decoder>(context_channels, encoder_.skip_mid_channels(),
                                         encoder_.skip_fine_channels(), spec_, rng_);
    register_module("decoder", *decoder_);
  }
}

NetworkOutput SegmentationNetwork::forward_detailed(const nn::Var& image) {
  const nn::Shape in = image.shape();
  if (in.c != 3) throw invalid_argument("network input must have 3 channels, got " + std::to_string(in.c));
  FeaturePyramid features = encoder_.forward(image);
  NetworkOutput out;
  nn::Var context = psp_->forward(features.deep);
  if (attention_) {
    AttentionOutput att = attention_->forward(context);
    out.attention_maps = att.maps;
    context = att.attended;
  }
  nn::Var scores = decoder_ ? decoder_->forward(context, features.skip_mid, features.skip_fine)
                            : classifier_->forward(context);
  out.scores = nn::resize_bilinear(scores, in.h, in.w);
  return out;
}

std::vector<std::string> SegmentationNetwork::blocks() const {
  std::vector<std::string> names{"encoder"};
  names.push_back("psp");
  if (attention_) names.push_back("attention");
  if (decoder_) names.push_back("decoder");
  if (classifier_) names.push_back("classifier");
  return names;
}

std::unique_ptr<SegmentationNetwork> build_network(const NetworkSpec& spec, std::uint64_t seed) {
  return std::make_unique<SegmentationNetwork>(spec, seed);
}

nn::Tensor image_to_tensor(const std::vector<std::uint8_t>& rgb, int width, int height) {
  if (rgb.size() != static_cast<std::size_t>(width) * height * 3) {
    throw invalid_argument("rgb buffer does not match image size");
  }
  nn::Tensor t(nn::Shape{1, 3, height, width});
  for (int c = 0; c < 3; ++c) {
    double* plane = t.plane(0, c);
    for (std::size_t i = 0; i < static_cast<std::size_t>(width) * height; ++i) {
      plane[i] = (rgb[3 * i + c] / 255.0 - kMean[c]) / kStd[c];
    }
  }
  return t;
}

Plane foreground_probability(const nn::Tensor& scores) {
  const nn::Shape s = scores.shape();
  if (s.c != 2) throw invalid_argument("expected two-class scores");
  Plane out(s.w, s.h);
  const double* bg = scores.plane(0, 0);
  const double* fg = scores.plane(0, 1);
  for (std::size_t i = 0; i < s.plane(); ++i) {
    out.data()[i] = 1.0 / (1.0 + std::exp(bg[i] - fg[i]));
  }
  return out;
}

}  // namespace weakseg::smanet
