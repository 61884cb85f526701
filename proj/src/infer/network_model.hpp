#pragma once

#include "infer/predict.hpp"
#include "smanet/network.hpp"

namespace weakseg::infer {

/// Runs a segmentation network in evaluation mode, without recording a tape.
class NetworkModel : public ProbabilityModel {
 public:
  explicit NetworkModel(smanet::SegmentationNetwork& network);
  Plane predict(const RgbImage& tile) override;

 private:
  smanet::SegmentationNetwork& network_;
};

}  // namespace weakseg::infer
