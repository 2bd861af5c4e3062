#include "nullfreq/mixture.hpp"

#include <cmath>
#include <complex>

namespace nullfreq {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

double sinc(double x) {
  if (std::abs(x) < 1e-6) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

double sinc_deriv(double x) {
  if (std::abs(x) < 1e-4) return -x / 3.0 + x * x * x / 30.0;
  return (std::cos(x) - std::sin(x) / x) / x;
}

// CF of mu ~ Uniform(lo, hi): e^{i t m} sinc(t d), m midpoint, d half-width.
std::complex<double> uniform_cf(const UniformLaw& law, double t) {
  const double m = 0.5 * (law.lo + law.hi);
  const double d = 0.5 * (law.hi - law.lo);
  return std::exp(kI * (m * t)) * sinc(t * d);
}

std::complex<double> uniform_cf_deriv(const UniformLaw& law, double t) {
  const double m = 0.5 * (law.lo + law.hi);
  const double d = 0.5 * (law.hi - law.lo);
  const auto rot = std::exp(kI * (m * t));
  return rot * (kI * m * sinc(t * d) + d * sinc_deriv(t * d));
}

}  // namespace

void MixtureSpec::validate() const {
  null_params.validate();
  if (!(eps >= 0.0 && eps <= 1.0)) fail(errc::invalid_input, "eps must lie in [0, 1]");
  if (!(mu1.lo < mu1.hi) || !(mu2.lo < mu2.hi)) {
    fail(errc::invalid_input, "uniform component bounds need lo < hi");
  }
  if (!(scale > 0.0)) fail(errc::invalid_input, "component scale must be positive");
}

MixtureSpec MixtureSpec::gaussian(double eps, NullParams null_params, UniformLaw mu1,
                                  UniformLaw mu2, double sigma) {
  MixtureSpec spec;
  spec.eps = eps;
  spec.null_params = null_params;
  spec.kind = NonnullKind::gaussian_two_component;
  spec.mu1 = mu1;
  spec.mu2 = mu2;
  spec.scale = sigma;
  spec.validate();
  return spec;
}

MixtureSpec MixtureSpec::double_exp(double eps, NullParams null_params, UniformLaw mu1,
                                    UniformLaw mu2, double tau) {
  MixtureSpec spec = gaussian(eps, null_params, mu1, mu2, tau);
  spec.kind = NonnullKind::double_exp_two_component;
  return spec;
}

MixtureSpec MixtureSpec::setting1() {
  return gaussian(0.2, NullParams{0.0, 1.0}, UniformLaw{-0.9, -0.1},
                  UniformLaw{0.5, 1.5}, 1.2);
}

std::complex<double> model_cf(const MixtureSpec& spec, double t) {
  spec.validate();
  if (!std::isfinite(t)) fail(errc::invalid_input, "non-finite frequency");
  if (!spec.analytic_cf_available) {
    fail(errc::unsupported_model, "spec provides no analytic characteristic function");
  }
  const double u0 = spec.null_params.u0;
  const double s0 = spec.null_params.sigma0;
  const auto null_cf = std::exp(kI * (u0 * t) - 0.5 * s0 * s0 * t * t);
  if (spec.eps == 0.0) return null_cf;

  const auto mix = 0.5 * (uniform_cf(spec.mu1, t) + uniform_cf(spec.mu2, t));
  std::complex<double> alt;
  if (spec.kind == NonnullKind::gaussian_two_component) {
    alt = std::exp(-0.5 * spec.scale * spec.scale * t * t) * mix;
  } else {
    alt = mix / (1.0 + spec.scale * spec.scale * t * t);
  }
  return (1.0 - spec.eps) * null_cf + spec.eps * alt;
}

std::complex<double> model_cf_deriv(const MixtureSpec& spec, double t) {
  const double u0 = spec.null_params.u0;
  const double s0 = spec.null_params.sigma0;
  const auto null_cf = std::exp(kI * (u0 * t) - 0.5 * s0 * s0 * t * t);
  const auto null_d = (kI * u0 - s0 * s0 * t) * null_cf;
  if (spec.eps == 0.0) return null_d;

  const auto mix = 0.5 * (uniform_cf(spec.mu1, t) + uniform_cf(spec.mu2, t));
  const auto mix_d = 0.5 * (uniform_cf_deriv(spec.mu1, t) + uniform_cf_deriv(spec.mu2, t));
  std::complex<double> alt_d;
  if (spec.kind == NonnullKind::gaussian_two_component) {
    const double s = spec.scale;
    const auto damp = std::exp(-0.5 * s * s * t * t);
    alt_d = damp * (mix_d - s * s * t * mix);
  } else {
    const double tau2 = spec.scale * spec.scale;
    const double den = 1.0 + tau2 * t * t;
    alt_d = mix_d / den - mix * (2.0 * tau2 * t) / (den * den);
  }
  return (1.0 - spec.eps) * null_d + spec.eps * alt_d;
}

namespace {

double normal_pdf(double x, double mu, double sigma) {
  const double z = (x - mu) / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * M_PI));
}

// Density of mu + scale*Z with mu ~ Uniform(lo,hi): for Gaussian Z this is
// (Phi((x-lo)/s) - Phi((x-hi)/s)) / (hi-lo); for Laplace Z the analogous
// closed form with the Laplace CDF.
double uniform_gaussian_density(const UniformLaw& law, double scale, double x) {
  auto Phi = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };
  return (Phi((x - law.lo) / scale) - Phi((x - law.hi) / scale)) / (law.hi - law.lo);
}

double uniform_laplace_density(const UniformLaw& law, double scale, double x) {
  auto F = [scale](double z) {
    if (z < 0.0) return 0.5 * std::exp(z / scale);
    return 1.0 - 0.5 * std::exp(-z / scale);
  };
  return (F(x - law.lo) - F(x - law.hi)) / (law.hi - law.lo);
}

}  // namespace

double model_density(const MixtureSpec& spec, double x) {
  spec.validate();
  const double null_part =
      normal_pdf(x, spec.null_params.u0, spec.null_params.sigma0);
  if (spec.eps == 0.0) return null_part;
  double alt;
  if (spec.kind == NonnullKind::gaussian_two_component) {
    alt = 0.5 * (uniform_gaussian_density(spec.mu1, spec.scale, x) +
                 uniform_gaussian_density(spec.mu2, spec.scale, x));
  } else {
    alt = 0.5 * (uniform_laplace_density(spec.mu1, spec.scale, x) +
                 uniform_laplace_density(spec.mu2, spec.scale, x));
  }
  return (1.0 - spec.eps) * null_part + spec.eps * alt;
}

}  // namespace nullfreq
