#pragma once

// Hand-counted 4x4 metric cases. Ground truth: 'T' text, '.' background,
// '?' uncertain. Prediction: '#' text, '.' background.

#include <string>
#include <vector>

#include "core/label_map.hpp"
#include "eval/metrics.hpp"

namespace weakseg::testing {

struct MetricCase {
  const char* name;
  std::vector<std::string> gt, pred;
  eval::PixelCounts counts;  // counted by hand
  double precision, recall, f1;
};

inline const std::vector<MetricCase>& metric_cases() {
  static const std::vector<MetricCase> cases = {
      {"perfect", {"TT..", "TT..", "....", "...."}, {"##..", "##..", "....", "...."}, {4, 0, 0, 12}, 1.0, 1.0, 1.0},
      {"one of each in the first row", {"TT..", "....", "....", "...."}, {"#.#.", "....", "....", "...."},
       {1, 1, 1, 13}, 0.5, 0.5, 0.5},
      {"all uncertain", {"????", "????", "????", "????"}, {"#.#.", ".#.#", "####", "...."}, {0, 0, 0, 0}, 0, 0, 0},
      {"everything predicted", {"TTT.", "....", "....", "...."}, {"####", "####", "####", "####"},
       {3, 13, 0, 0}, 3.0 / 16, 1.0, 2 * (3.0 / 16) / (3.0 / 16 + 1)},
      {"nothing predicted", {"TTTT", "T...", "....", "...."}, {"....", "....", "....", "...."}, {0, 0, 5, 11}, 0, 0, 0},
      {"uncertain excluded", {"T?..", "T?..", "??..", "...."}, {"####", "....", "#...", "...."},
       {1, 2, 1, 8}, 1.0 / 3, 0.5, 0.4},
      {"no text in ground truth", {"....", "....", "....", "...."}, {".#..", "..#.", "....", "...."},
       {0, 2, 0, 14}, 0, 0, 0},
      {"all text", {"TTTT", "TTTT", "TTTT", "TTTT"}, {"####", "####", "####", "####"}, {16, 0, 0, 0}, 1, 1, 1},
      {"inverted checkerboard", {"T.T.", ".T.T", "T.T.", ".T.T"}, {".#.#", "#.#.", ".#.#", "#.#."},
       {0, 8, 8, 0}, 0, 0, 0},
      {"two thirds", {"TTT.", "....", "....", "...."}, {"##.#", "....", "....", "...."},
       {2, 1, 1, 12}, 2.0 / 3, 2.0 / 3, 2.0 / 3},
  };
  return cases;
}

inline LabelMap grid_labels(const std::vector<std::string>& rows) {
  LabelMap l(static_cast<int>(rows[0].size()), static_cast<int>(rows.size()));
  for (int y = 0; y < l.height(); ++y)
    for (int x = 0; x < l.width(); ++x) {
      const char c = rows[y][x];
      l.set(x, y, c == 'T' ? Label::kForeground : c == '?' ? Label::kUncertain : Label::kBackground);
    }
  return l;
}

inline BinaryMask grid_mask(const std::vector<std::string>& rows) {
  BinaryMask m(static_cast<int>(rows[0].size()), static_cast<int>(rows.size()));
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) m.at(x, y) = rows[y][x] == '#' ? 1 : 0;
  return m;
}

}  // namespace weakseg::testing
