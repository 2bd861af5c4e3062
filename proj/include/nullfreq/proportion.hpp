#pragma once

#include "nullfreq/types.hpp"

namespace nullfreq {

struct ProportionEstimate {
  double raw = 0.0;
  double clamped = 0.0;  // min(1, max(0, raw))
  double gamma = 0.0;
  double t_used = 0.0;
};

ProportionEstimate make_proportion_estimate(double raw, double gamma, double t_used);

/// eps_hat_n(gamma) = 1 - n^(gamma-1) sum_j cos(sqrt(2 gamma log n) X_j),
/// for data already standardized under the known null.
ProportionEstimate estimate_eps_known_null(const Sample& sample,
                                           double gamma = kDefaultGamma);

/// Known-null estimator applied to (X - u0)/sigma0 with the given null.
ProportionEstimate estimate_eps_standardized(const Sample& sample, double gamma,
                                             const NullParams& null_params);

/// Plug-in estimator: standardizes by estimate_null(sample, gamma) first.
ProportionEstimate estimate_eps_plugin(const Sample& sample,
                                       double gamma = kDefaultGamma);

enum class WeightKind { uniform, triangle, smooth };

/// Bounded symmetric weight density on (-1, 1) for the phase-function
/// estimator.  `smooth` is proportional to exp(-1/(1-xi^2)).
struct WeightDensity {
  WeightKind kind = WeightKind::uniform;
  double operator()(double xi) const;

  static WeightDensity uniform() { return {WeightKind::uniform}; }
  static WeightDensity triangle() { return {WeightKind::triangle}; }
  static WeightDensity smooth() { return {WeightKind::smooth}; }
};

/// Legacy comparison baseline: eps = 1 - Re psi_n(t; omega) with
/// psi_n(t; omega) = int omega(xi) e^{t^2 xi^2/2} phi_n(t xi) dxi evaluated
/// at t = sqrt(2 gamma log n) by adaptive quadrature.
ProportionEstimate phase_function_estimator(const Sample& sample, double gamma,
                                            const WeightDensity& omega);

}  // namespace nullfreq
