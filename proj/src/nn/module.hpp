#pragma once

#include <string>
#include <utility>
#include <vector>

#include "nn/autograd.hpp"

namespace weakseg::nn {

using NamedVar = std::pair<std::string, Var>;

/// Owner of named parameters, buffers and child modules. Children are
/// registered by reference and must be members of (or owned by) the parent.
class Module {
 public:
  Module() = default;
  virtual ~Module() = default;
  Module(const Module&) = delete;
  Module& operator=(const Module&) = delete;

  void set_training(bool training);
  bool training() const { return training_; }

  std::vector<NamedVar> named_parameters() const;
  /// Parameters followed by buffers (e.g. batch-norm running statistics).
  std::vector<NamedVar> named_state() const;
  std::size_t parameter_count() const;

 protected:
  Var register_parameter(const std::string& name, Tensor init);
  Var register_buffer(const std::string& name, Tensor init);
  void register_module(const std::string& name, Module& child);

 private:
  void collect(const std::string& prefix, bool with_buffers, std::vector<NamedVar>& out) const;

  bool training_ = true;
  std::vector<NamedVar> parameters_;
  std::vector<NamedVar> buffers_;
  std::vector<std::pair<std::string, Module*>> children_;
};

}  // namespace weakseg::nn
