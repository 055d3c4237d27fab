#include "regraph/grad_check.hpp"

#include <cmath>

namespace regraph {

GradCheckReport grad_check(const LossFn& loss_fn, ParamStore& params, double h, double tol) {
  if (h < 1e-7 || h > 1e-4) {
    throw ValidationError("grad_check: h must lie in [1e-7, 1e-4], got " + std::to_string(h));
  }

  const double base1 = loss_fn(params, false);
  const double base2 = loss_fn(params, false);
  if (base1 != base2) {
    throw DeterminismError("grad_check: loss_fn is not deterministic (" +
                           std::to_string(base1) + " vs " + std::to_string(base2) + ")");
  }

  params.zero_grads();
  loss_fn(params, true);

  GradCheckReport report;
  report.h = h;
  report.tol = tol;
  for (auto& [name, entry] : params.entries()) {
    GradCheckReport::Entry re;
    re.name = name;
    for (std::size_t i = 0; i < entry.value.size(); ++i) {
      const double saved = entry.value.data[i];
      entry.value.data[i] = saved + h;
      const double up = loss_fn(params, false);
      entry.value.data[i] = saved - h;
      const double down = loss_fn(params, false);
      entry.value.data[i] = saved;

      const double numeric = (up - down) / (2.0 * h);
      const double analytic = entry.grad.data[i];
      const double denom = std::max({std::fabs(analytic), std::fabs(numeric), 1e-8});
      const double rel = std::fabs(analytic - numeric) / denom;
      re.max_rel_err = std::max(re.max_rel_err, rel);
    }
    report.max_rel_err = std::max(report.max_rel_err, re.max_rel_err);
    report.entries.push_back(std::move(re));
  }
  report.passed = report.max_rel_err <= tol;
  return report;
}

}  // namespace regraph
