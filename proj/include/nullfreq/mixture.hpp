#pragma once

#include <complex>

#include "nullfreq/types.hpp"

namespace nullfreq {

enum class NonnullKind { gaussian_two_component, double_exp_two_component };

struct UniformLaw {
  double lo = 0.0;
  double hi = 1.0;
};

/// Generative description of the two-group model: with probability 1-eps a
/// draw is N(u0, sigma0^2); otherwise the mean comes from one of two uniform
/// laws (fair coin) and the draw is Gaussian or double-exponential around it.
struct MixtureSpec {
  double eps = 0.0;
  NullParams null_params;
  NonnullKind kind = NonnullKind::gaussian_two_component;
  UniformLaw mu1{-0.9, -0.1};
  UniformLaw mu2{0.5, 1.5};
  double scale = 1.2;  // sigma for Gaussian nonnulls, tau for double-exp
  bool analytic_cf_available = true;

  void validate() const;

  static MixtureSpec gaussian(double eps, NullParams null_params, UniformLaw mu1,
                              UniformLaw mu2, double sigma);
  static MixtureSpec double_exp(double eps, NullParams null_params, UniformLaw mu1,
                                UniformLaw mu2, double tau);
  /// Settings 1/2/3a/3b/5a/5b share this family (Eq. mu-laws above).
  static MixtureSpec setting1();
};

/// CF of X = mu + scale*Z with mu ~ Uniform(law) and Z standard normal or
/// standard Laplace, depending on `kind`.
std::complex<double> model_cf(const MixtureSpec& spec, double t);
std::complex<double> model_cf_deriv(const MixtureSpec& spec, double t);

/// Model density f(x) (used by oracle testing pipelines).
double model_density(const MixtureSpec& spec, double x);

}  // namespace nullfreq
