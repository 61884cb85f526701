#pragma once

#include <vector>

#include "nn/autograd.hpp"

namespace weakseg::nn {

struct AdamOptions {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adaptive-moment optimiser with bias correction. Parameters without a
/// gradient in a step are left untouched.
class Adam {
 public:
  Adam(std::vector<Var> params, AdamOptions options);

  void step();
  void zero_grad();
  long steps_taken() const { return t_; }

 private:
  std::vector<Var> params_;
  std::vector<Tensor> m_, v_;
  AdamOptions options_;
  long t_ = 0;
};

}  // namespace weakseg::nn
