#pragma once

#include <cstdint>

#include "core/label_map.hpp"

namespace weakseg::eval {

/// Pixel confusion counts with foreground as the positive class.
struct PixelCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;

  std::uint64_t total() const { return tp + fp + fn + tn; }
  PixelCounts& operator+=(const PixelCounts& o) {
    tp += o.tp, fp += o.fp, fn += o.fn, tn += o.tn;
    return *this;
  }
  bool operator==(const PixelCounts&) const = default;
};

struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Counts over pixels whose ground truth is background or foreground; any
/// nonzero prediction value is foreground. Uncertain ground truth is skipped.
PixelCounts accumulate_counts(const BinaryMask& prediction, const LabelMap& gt);

/// Each ratio is 0 when its denominator is 0.
Metrics compute_metrics(const PixelCounts& counts);
double f1_score(double precision, double recall);

/// f1 - baseline, both given as fractions, in percentage points.
double relative_delta(double f1, double baseline_f1);

}  // namespace weakseg::eval
