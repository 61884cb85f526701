#pragma once

#include "smanet/network_spec.hpp"

namespace weakseg::testing {

/// Narrow, shallow network so CPU tests stay fast; topology is unchanged.
inline smanet::NetworkSpec tiny_spec(smanet::Variant variant = smanet::Variant::kSmaNet) {
  smanet::NetworkSpec spec;
  spec.variant = variant;
  spec.encoder.blocks = {1, 1, 1, 1};
  spec.encoder.base_width = 4;
  spec.psp_bins = {1, 2};
  spec.reduced_channels = 16;
  spec.attention_channels = 16;
  spec.branch_channels = 8;
  spec.attention_hidden = 8;
  spec.skip_channels = {6, 4};
  spec.decoder_channels = {12, 8};
  return spec;
}

}  // namespace weakseg::testing
