#include "train/loss.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "core/error.hpp"

namespace weakseg::train {

nn::Var masked_loss_codes(const nn::Var& scores, const std::vector<const Raster<std::uint8_t>*>& codes) {
  const nn::Shape s = scores.shape();
  if (s.c != 2) throw invalid_argument("masked loss expects two-class scores");
  if (static_cast<int>(codes.size()) != s.n) throw invalid_argument("one label map per batch item required");
  for (const auto* c : codes) {
    if (c->width() != s.w || c->height() != s.h) {
      throw invalid_argument("label size " + std::to_string(c->width()) + "x" + std::to_string(c->height()) +
                             " does not match scores " + std::to_string(s.w) + "x" + std::to_string(s.h));
    }
    for (std::uint8_t v : c->data()) {
      if (!is_valid_label_code(v)) throw invalid_argument("invalid label code " + std::to_string(int(v)));
    }
  }

  // Softmax gradient is computed once here and reused by backward.
  auto grad = std::make_shared<nn::Tensor>(s);
  const nn::Tensor& x = scores.value();
  double total = 0.0;
  std::size_t count = 0;
  for (int n = 0; n < s.n; ++n) {
    const double* bg = x.plane(n, 0);
    const double* fg = x.plane(n, 1);
    double* gbg = grad->plane(n, 0);
    double* gfg = grad->plane(n, 1);
    const auto& lab = codes[n]->data();
    for (std::size_t i = 0; i < s.plane(); ++i) {
      const std::uint8_t y = lab[i];
      if (y == static_cast<std::uint8_t>(Label::kUncertain)) continue;
      const double m = std::max(bg[i], fg[i]);
      const double lse = m + std::log(std::exp(bg[i] - m) + std::exp(fg[i] - m));
      total += lse - (y == 1 ? fg[i] : bg[i]);
      const double p_fg = std::exp(fg[i] - lse);
      gfg[i] = p_fg - (y == 1 ? 1.0 : 0.0);
      gbg[i] = (1.0 - p_fg) - (y == 0 ? 1.0 : 0.0);
      ++count;
    }
  }
  const double scale = count ? 1.0 / static_cast<double>(count) : 0.0;
  for (double& g : grad->values()) g *= scale;

  nn::Tensor loss(nn::Shape{1, 1, 1, 1}, total * scale);
  return nn::make_result(std::move(loss), {scores}, [grad](nn::Node& self) {
    nn::Node& in = *self.inputs[0];
    if (!in.requires_grad) return;
    const double upstream = self.grad.values()[0];
    auto& dst = in.grad_buffer().values();
    const auto& src = grad->values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += upstream * src[i];
  });
}

nn::Var masked_loss(const nn::Var& scores, const std::vector<LabelMap>& labels) {
  std::vector<const Raster<std::uint8_t>*> codes;
  for (const LabelMap& l : labels) codes.push_back(&l.codes());
  return masked_loss_codes(scores, codes);
}

nn::Var masked_loss(const nn::Var& scores, const LabelMap& label) {
  return masked_loss(scores, std::vector<LabelMap>{label});
}

}  // namespace weakseg::train
