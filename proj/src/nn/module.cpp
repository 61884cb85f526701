#include "nn/module.hpp"

namespace weakseg::nn {

void Module::set_training(bool training) {
  training_ = training;
  for (auto& [name, child] : children_) child->set_training(training);
}

std::vector<NamedVar> Module::named_parameters() const {
  std::vector<NamedVar> out;
  collect("", false, out);
  return out;
}

std::vector<NamedVar> Module::named_state() const {
  std::vector<NamedVar> params;
  collect("", false, params);
  std::vector<NamedVar> all;
  collect("", true, all);
  // Parameters first, then everything that is a buffer.
  std::vector<NamedVar> out = params;
  for (auto& entry : all) {
    if (!entry.second.requires_grad()) out.push_back(entry);
  }
  return out;
}

std::size_t Module::parameter_count() const {
  std::size_t total = 0;
  for (const auto& [name, var] : named_parameters()) total += var.value().numel();
  return total;
}

Var Module::register_parameter(const std::string& name, Tensor init) {
  Var v(std::move(init), true);
  parameters_.emplace_back(name, v);
  return v;
}

Var Module::register_buffer(const std::string& name, Tensor init) {
  Var v(std::move(init), false);
  buffers_.emplace_back(name, v);
  return v;
}

void Module::register_module(const std::string& name, Module& child) {
  children_.emplace_back(name, &child);
}

void Module::collect(const std::string& prefix, bool with_buffers, std::vector<NamedVar>& out) const {
  for (const auto& [name, var] : parameters_) out.emplace_back(prefix + name, var);
  if (with_buffers) {
    for (const auto& [name, var] : buffers_) out.emplace_back(prefix + name, var);
  }
  for (const auto& [name, child] : children_) child->collect(prefix + name + ".", with_buffers, out);
}

}  // namespace weakseg::nn
