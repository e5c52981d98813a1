#pragma once

#include <cmath>
#include <functional>

#include "panap/params.hpp"

namespace panap {

// loss_fn evaluates the loss over the store; when grads is non-null it must
// also fill analytic gradients for every slot (reverse_accumulate does).
using LossFn = std::function<double(ParameterStore&, GradMap* grads)>;

// Central-difference check over every parameter entry. Returns
// max |analytic - numeric| / max(1e-6, |analytic| + |numeric|). The
// denominator floor absorbs the estimator's own noise: round-off on the
// loss difference alone contributes ~eps_mach * |loss| / (2 * epsilon),
// which dwarfs gradient entries in the 1e-9 range.
inline double finite_difference_check(const LossFn& loss_fn,
                                      ParameterStore& store,
                                      double epsilon = 1e-5) {
  GradMap analytic;
  double base = loss_fn(store, &analytic);
  if (!std::isfinite(base)) numeric_error("finite_difference_check: loss is not finite");
  double worst = 0.0;
  for (auto& [name, slot] : store.slots_mut()) {
    auto it = analytic.find(name);
    if (it == analytic.end())
      usage_error("finite_difference_check: no analytic gradient for " + name);
    for (int64_t i = 0; i < slot.value.numel(); ++i) {
      double saved = slot.value.v[i];
      slot.value.v[i] = saved + epsilon;
      double up = loss_fn(store, nullptr);
      slot.value.v[i] = saved - epsilon;
      double down = loss_fn(store, nullptr);
      slot.value.v[i] = saved;
      if (!std::isfinite(up) || !std::isfinite(down))
        numeric_error("finite_difference_check: perturbed loss is not finite");
      double numeric = (up - down) / (2.0 * epsilon);
      double a = it->second.v[i];
      double err = std::fabs(a - numeric) / std::max(1e-6, std::fabs(a) + std::fabs(numeric));
      if (err > worst) worst = err;
    }
  }
  return worst;
}

}  // namespace panap
