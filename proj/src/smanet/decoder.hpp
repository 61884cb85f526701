#pragma once

#include <memory>
#include <vector>

#include "nn/layers.hpp"
#include "smanet/network_spec.hpp"

namespace weakseg::smanet {

/// x2 upsample to the skip's size, concat with a 1x1-reduced skip, then two
/// convolutions. The last stage ends in a 1x1 classifier instead of a 3x3.
class DecoderStage : public nn::Module {
 public:
  DecoderStage(int in_channels, int skip_in, int skip_out, int out_channels, nn::Rng& rng,
               int classes = 0);
  nn::Var forward(const nn::Var& x, const nn::Var& skip);
  int out_channels() const { return out_channels_; }

 private:
  nn::ConvBnRelu skip_reduce_;
  nn::ConvBnRelu first_;
  std::unique_ptr<nn::ConvBnRelu> second_;
  std::unique_ptr<nn::Conv2d> classifier_;
  int out_channels_;
};

class Decoder : public nn::Module {
 public:
  Decoder(int in_channels, int skip_mid_channels, int skip_fine_channels, const NetworkSpec& spec,
          nn::Rng& rng);
  /// Scores at the skip_fine resolution; callers upsample to the input.
  nn::Var forward(const nn::Var& x, const nn::Var& skip_mid, const nn::Var& skip_fine);

 private:
  DecoderStage mid_;
  DecoderStage fine_;
};

}  // namespace weakseg::smanet
