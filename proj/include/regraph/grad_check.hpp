#pragma once

#include <functional>
#include <string>
#include <vector>

#include "regraph/param_store.hpp"

namespace regraph {

// loss_fn(params, with_grad): returns the scalar loss; when with_grad is true
// it must also accumulate analytic gradients into params (grads are zeroed by
// the checker beforehand).
using LossFn = std::function<double(ParamStore&, bool with_grad)>;

struct GradCheckReport {
  struct Entry {
    std::string name;
    double max_rel_err = 0.0;
  };
  std::vector<Entry> entries;
  double max_rel_err = 0.0;
  bool passed = false;
  double h = 0.0;
  double tol = 0.0;
};

struct DeterminismError : std::runtime_error {
  explicit DeterminismError(const std::string& msg) : std::runtime_error(msg) {}
};

// Central-difference check of every parameter entry. Relative error uses
// denominator max(|analytic|, |numeric|, 1e-8). h must lie in [1e-7, 1e-4].
GradCheckReport grad_check(const LossFn& loss_fn, ParamStore& params, double h, double tol);

}  // namespace regraph
