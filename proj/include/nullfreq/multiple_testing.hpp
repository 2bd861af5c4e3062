#pragma once

#include "nullfreq/baselines.hpp"
#include "nullfreq/proportion.hpp"
#include "nullfreq/types.hpp"

namespace nullfreq {

struct RejectionSet {
  std::vector<bool> rejected;
  int count = 0;
};

/// Benjamini-Hochberg step-up at level alpha.
RejectionSet bh_stepup(const PValueVector& pvals, double alpha);

/// BH step-up at the inflated level alpha / (1 - eps_hat.clamped).
RejectionSet adaptive_bh(const PValueVector& pvals, double alpha,
                         const ProportionEstimate& eps_hat);

/// Gaussian-kernel density estimate.  Evaluation is linear-binned on a fine
/// grid for large n (exact summation below kExactKdeCutoff), which keeps the
/// testing pipelines O(n) per replication.
struct DensityEstimate {
  double bandwidth = 0.0;
  double grid_lo = 0.0;
  double grid_step = 0.0;
  std::vector<double> density;   // smoothed values on the grid
  std::vector<double> points;    // kept only on the exact path
  bool exact = false;

  double operator()(double x) const;
};

struct BandwidthRule {
  enum class Kind { silverman, loo_cv } kind = Kind::silverman;
  std::vector<double> grid;  // candidate bandwidths for loo_cv

  static BandwidthRule silverman() { return {}; }
  static BandwidthRule loo_cv(std::vector<double> grid);
  /// 20-point log-spaced grid around the Silverman bandwidth.
  static BandwidthRule loo_cv_default(const Sample& sample);
};

DensityEstimate kde(const Sample& sample, const BandwidthRule& rule = {});

/// Lfdr(x_i) = (1 - eps) f_null(x_i) / f_tilde(x_i), capped at 1.
std::vector<double> lfdr_values(const Sample& sample, const ProportionEstimate& eps_hat,
                                const NullParams& null_params,
                                const DensityEstimate& f_tilde);

/// Sun-Cai AdaptZ: reject the k* smallest Lfdr values where k* is the largest
/// k whose running Lfdr mean stays <= alpha.
RejectionSet adaptz(const Sample& sample, double alpha, const ProportionEstimate& eps_hat,
                    const NullParams& null_params, const DensityEstimate& f_tilde);

RejectionSet adaptz_from_lfdr(const std::vector<double>& lfdr, double alpha);

/// False discovery proportion: false rejections / max(1, #rejections).
double evaluate_fdp(const RejectionSet& rejections, const std::vector<bool>& truth);

}  // namespace nullfreq
