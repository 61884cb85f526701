#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "nn/tensor.hpp"

namespace weakseg::nn {

struct Node;
using BackwardFn = std::function<void(Node& self)>;

/// One value in the computation tape. Non-leaf nodes keep their inputs alive
/// until the graph is dropped.
struct Node {
  Tensor value;
  Tensor grad;  // allocated on first accumulation
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> inputs;
  BackwardFn backward;

  /// Zero-initialised gradient buffer of the value's shape.
  Tensor& grad_buffer();
};

/// Shared handle to a tape node.
class Var {
 public:
  Var() = default;
  explicit Var(Tensor value, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Tensor& value() const { return node_->value; }
  Tensor& mutable_value() { return node_->value; }
  const Shape& shape() const { return node_->value.shape(); }
  bool requires_grad() const { return node_ && node_->requires_grad; }

  bool has_grad() const { return node_ && !node_->grad.empty(); }
  const Tensor& grad() const { return node_->grad; }
  void zero_grad() { node_->grad = Tensor(); }

  Node* node() const { return node_.get(); }
  const std::shared_ptr<Node>& ptr() const { return node_; }

 private:
  friend Var make_result(Tensor, std::vector<Var>, BackwardFn);
  std::shared_ptr<Node> node_;
};

/// Records an op result. The backward function is kept only when gradient
/// recording is on and some input requires a gradient.
Var make_result(Tensor value, std::vector<Var> inputs, BackwardFn backward);

/// Reverse-mode sweep from a scalar root (seed gradient 1).
void backward(const Var& root);

bool grad_enabled();

class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

}  // namespace weakseg::nn
