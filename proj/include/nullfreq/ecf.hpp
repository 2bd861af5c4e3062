#pragma once

#include <complex>
#include <functional>

#include "nullfreq/mixture.hpp"
#include "nullfreq/types.hpp"

namespace nullfreq {

/// First frequency at which |phi_n| crosses n^(-gamma).
struct FrequencyThreshold {
  double t_hat = 0.0;
  double gamma = 0.0;
  double modulus_at_t = 0.0;
};

/// phi_n(t) = (1/n) sum_j exp(i t X_j).  Pairwise-summed, deterministic.
std::complex<double> ecf_eval(const Sample& sample, double t);

/// Exact analytic derivative phi_n'(t) = (i/n) sum_j X_j exp(i t X_j).
std::complex<double> ecf_deriv(const Sample& sample, double t);

/// A characteristic function together with its exact derivative.
struct CfHandle {
  std::function<std::complex<double>(double)> value;
  std::function<std::complex<double>(double)> deriv;
};

CfHandle make_ecf_handle(const Sample& sample);
CfHandle make_model_handle(const MixtureSpec& spec);

/// t_hat_n(gamma) = min{t > 0 : |phi_n(t)| <= n^(-gamma)}.  Scans a 0.01 grid
/// and bisects the first bracket to 1e-10 in t.
FrequencyThreshold threshold_freq(const Sample& sample, double gamma);

/// Deterministic counterpart on the analytic model CF.
double deterministic_threshold_freq(const MixtureSpec& spec, std::size_t n,
                                    double gamma);

}  // namespace nullfreq
