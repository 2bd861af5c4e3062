#pragma once

#include "nullfreq/proportion.hpp"
#include "nullfreq/types.hpp"

namespace nullfreq {

/// Two-sided p-values, length n, every entry in [0, 1].
struct PValueVector {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
};

/// p_j = 2 (1 - Phi(|X_j - u0| / sigma0)).
PValueVector pvalues_from_null(const Sample& sample, const NullParams& null_params);

double norm_cdf(double x);

/// Storey (2002): pi0_hat = #{p_j > lambda} / ((1 - lambda) n); eps = 1 - pi0.
ProportionEstimate storey_estimator(const PValueVector& pvals, double lambda = 0.5);

struct EfronEstimate {
  NullParams null_params;
  double sigma0_sq = 0.0;
  ProportionEstimate eps;
};

/// Central matching: quadratic fit to log-counts over the central histogram
/// window.  Throws Error(divergence) when the fitted curvature is
/// nonnegative or the window degenerates; callers are expected to count such
/// failures rather than mask them.
EfronEstimate efron_estimator(const Sample& sample);

}  // namespace nullfreq
