#include "nn/tensor.hpp"

#include <algorithm>

#include "core/error.hpp"

namespace weakseg::nn {

std::string Shape::str() const {
  return "[" + std::to_string(n) + "," + std::to_string(c) + "," + std::to_string(h) + "," +
         std::to_string(w) + "]";
}

Tensor::Tensor(Shape shape, double fill) : shape_(shape) {
  if (shape.n < 0 || shape.c < 0 || shape.h < 0 || shape.w < 0) {
    throw invalid_argument("negative tensor extent " + shape.str());
  }
  data_.assign(shape.numel(), fill);
}

void Tensor::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

Tensor Tensor::reshaped(Shape shape) const {
  if (shape.numel() != numel()) {
    throw invalid_argument("cannot reshape " + shape_.str() + " to " + shape.str());
  }
  Tensor out = *this;
  out.shape_ = shape;
  return out;
}

}  // namespace weakseg::nn
