#pragma once

#include <vector>

#include "core/label_map.hpp"
#include "nn/autograd.hpp"

namespace weakseg::train {

/// Two-class cross-entropy averaged over the pixels whose label is
/// background or foreground. Uncertain pixels get neither loss nor gradient;
/// a batch with no certain pixel has loss 0.
/// scores: (N,2,H,W) logits; labels: one H x W map per batch item.
nn::Var masked_loss(const nn::Var& scores, const std::vector<LabelMap>& labels);
nn::Var masked_loss(const nn::Var& scores, const LabelMap& label);

/// Same computation over raw label codes; throws on a code outside {0, 1, 255}.
nn::Var masked_loss_codes(const nn::Var& scores, const std::vector<const Raster<std::uint8_t>*>& codes);

}  // namespace weakseg::train
