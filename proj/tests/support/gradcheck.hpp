#pragma once

// Central finite-difference oracle for the autograd engine. It only reads
// and perturbs leaf values, so it is independent of every backward rule.

#include <cmath>
#include <functional>
#include <vector>

#include "nn/autograd.hpp"
#include "nn/ops.hpp"
#include "nn/rng.hpp"

namespace weakseg::testing {

inline nn::Tensor random_tensor(nn::Shape shape, nn::Rng& rng, double scale = 1.0) {
  nn::Tensor t(shape);
  for (double& v : t.values()) v = rng.normal(0.0, scale);
  return t;
}

struct GradCheckResult {
  double relative_error = 0.0;  // ||analytic - numeric|| / max(||analytic||, ||numeric||)
  double numeric_norm = 0.0;
  std::size_t checked = 0;
};

/// Compares d(sum(f() * probe))/d(leaf) against central differences for every
/// leaf in `leaves`. When `max_entries` is set, a strided subset of entries is
/// checked per leaf.
inline GradCheckResult gradient_check(const std::function<nn::Var()>& f, std::vector<nn::Var> leaves,
                                      std::uint64_t seed, double eps = 1e-6,
                                      std::size_t max_entries = 0) {
  nn::Rng rng(seed);
  nn::Var probe_out;
  {
    nn::NoGradGuard guard;
    probe_out = f();
  }
  const nn::Tensor probe = random_tensor(probe_out.shape(), rng);

  for (nn::Var& leaf : leaves) leaf.zero_grad();
  nn::Var loss = nn::weighted_sum(f(), probe);
  nn::backward(loss);

  auto objective = [&]() {
    nn::NoGradGuard guard;
    return nn::weighted_sum(f(), probe).value().values()[0];
  };

  double diff_sq = 0.0, analytic_sq = 0.0, numeric_sq = 0.0;
  std::size_t checked = 0;
  for (nn::Var& leaf : leaves) {
    auto& values = leaf.mutable_value().values();
    const std::size_t n = values.size();
    const std::size_t stride = (max_entries == 0 || n <= max_entries) ? 1 : n / max_entries;
    for (std::size_t i = 0; i < n; i += stride) {
      const double saved = values[i];
      values[i] = saved + eps;
      const double plus = objective();
      values[i] = saved - eps;
      const double minus = objective();
      values[i] = saved;
      const double numeric = (plus - minus) / (2.0 * eps);
      const double analytic = leaf.has_grad() ? leaf.grad().values()[i] : 0.0;
      diff_sq += (analytic - numeric) * (analytic - numeric);
      analytic_sq += analytic * analytic;
      numeric_sq += numeric * numeric;
      ++checked;
    }
  }
  const double scale = std::max(std::sqrt(analytic_sq), std::sqrt(numeric_sq));
  GradCheckResult result;
  result.relative_error = scale > 0.0 ? std::sqrt(diff_sq) / scale : 0.0;
  result.numeric_norm = std::sqrt(numeric_sq);
  result.checked = checked;
  return result;
}

}  // namespace weakseg::testing
