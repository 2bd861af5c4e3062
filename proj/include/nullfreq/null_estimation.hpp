#pragma once

#include "nullfreq/ecf.hpp"
#include "nullfreq/types.hpp"

namespace nullfreq {

/// sigma0^2(t; xi) = -Re(conj(xi(t)) xi'(t)) / (t |xi(t)|^2), which equals
/// -(d/ds |xi(s)|) / (s |xi(s)|) at s = t.
double sigma_functional(const CfHandle& xi, double t);

/// u0(t; xi) = Im(conj(xi(t)) xi'(t)) / |xi(t)|^2, the phase derivative.
double mean_functional(const CfHandle& xi, double t);

struct NullEstimate {
  NullParams params;
  double sigma0_sq = 0.0;
  FrequencyThreshold threshold;
};

/// Null-parameter estimators evaluated at the data-driven frequency
/// t_hat_n(gamma).  Throws Error(nonpositive_variance) when the variance
/// functional comes out <= 0 (gamma too large or n too small).
NullEstimate estimate_null_detail(const Sample& sample, double gamma = kDefaultGamma);
NullParams estimate_null(const Sample& sample, double gamma = kDefaultGamma);

}  // namespace nullfreq
