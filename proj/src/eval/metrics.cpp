#include "eval/metrics.hpp"

#include "core/error.hpp"

namespace weakseg::eval {

PixelCounts accumulate_counts(const BinaryMask& prediction, const LabelMap& gt) {
  if (prediction.size() != gt.size()) {
    throw invalid_argument("prediction is " + std::to_string(prediction.width()) + "x" +
                           std::to_string(prediction.height()) + " but ground truth is " +
                           std::to_string(gt.width()) + "x" + std::to_string(gt.height()));
  }
  PixelCounts c;
  const auto& p = prediction.data();
  const auto& g = gt.codes().data();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const bool pred_fg = p[i] != 0;
    switch (static_cast<Label>(g[i])) {
      case Label::kForeground: (pred_fg ? c.tp : c.fn) += 1; break;
      case Label::kBackground: (pred_fg ? c.fp : c.tn) += 1; break;
      case Label::kUncertain: break;
    }
  }
  return c;
}

double f1_score(double precision, double recall) {
  return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

Metrics compute_metrics(const PixelCounts& c) {
  Metrics m;
  if (c.tp + c.fp > 0) m.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  if (c.tp + c.fn > 0) m.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  m.f1 = f1_score(m.precision, m.recall);
  return m;
}

double relative_delta(double f1, double baseline_f1) { return 100.0 * (f1 - baseline_f1); }

}  // namespace weakseg::eval
