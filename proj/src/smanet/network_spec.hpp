#pragma once

#include <json.hpp>
#include <string>
#include <vector>

namespace weakseg::smanet {

enum class Variant {
  kPspBaseline,        // encoder + pyramid pooling head + classifier
  kPspDoubleDecoder,   // pyramid pooling head followed by the two-level decoder
  kSmaNet,             // as above with multiscale attention gating before the decoder
};

const char* to_string(Variant variant);
/// Accepts the canonical names and the CLI aliases psp / psp-dd.
Variant variant_from_string(const std::string& text);

struct EncoderSpec {
  std::vector<int> blocks{3, 4, 6, 3};  // bottlenecks per residual stage
  int base_width = 64;                  // stem channels; stage widths are base * {1,2,4,8}
  bool operator==(const EncoderSpec&) const = default;
};

/// Declarative description of a segmentation network. Defaults give the
/// ResNet50-topology configuration; tests shrink the widths and depths.
struct NetworkSpec {
  Variant variant = Variant::kSmaNet;
  int num_classes = 2;
  EncoderSpec encoder;
  int output_stride = 8;
  std::vector<int> attention_rates{1, 2, 4};
  std::vector<int> psp_bins{1, 2, 3, 6};
  int reduced_channels = 512;     // 1x1 projection of the encoder output
  int attention_channels = 512;   // conv in front of the dilated pyramid
  int branch_channels = 128;      // per dilated branch, before pyramid pooling
  int attention_hidden = 256;     // conv between pyramid and the two-map logits
  std::vector<int> skip_channels{48, 32};      // reductions of the two skip features
  std::vector<int> decoder_channels{256, 128};

  bool operator==(const NetworkSpec&) const = default;

  /// Throws invalid_argument naming the offending field.
  void validate() const;

  nlohmann::ordered_json to_json() const;
  static NetworkSpec from_json(const nlohmann::json& j);
};

}  // namespace weakseg::smanet
