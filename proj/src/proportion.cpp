#include "nullfreq/proportion.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "nullfreq/ecf.hpp"
#include "nullfreq/null_estimation.hpp"

namespace nullfreq {

namespace {

void check_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma < 0.5)) {
    fail(errc::invalid_input, "gamma must lie in (0, 1/2)");
  }
}

// 1 - n^{gamma-1} sum cos(t z_j) with t = sqrt(2 gamma log n), z standardized.
ProportionEstimate eps_cosine_sum(const std::vector<double>& z, double gamma) {
  const double n = static_cast<double>(z.size());
  const double t = std::sqrt(2.0 * gamma * std::log(n));
  double s = 0.0;
  for (double v : z) s += std::cos(t * v);
  const double raw = 1.0 - std::pow(n, gamma - 1.0) * s;
  return make_proportion_estimate(raw, gamma, t);
}

// Normalizer of exp(-1/(1-xi^2)) on (-1, 1); see WeightDensity::smooth.
constexpr double kSmoothNorm = 2.2522836210435810105;

}  // namespace

ProportionEstimate make_proportion_estimate(double raw, double gamma, double t_used) {
  ProportionEstimate e;
  e.raw = raw;
  e.clamped = std::min(1.0, std::max(0.0, raw));
  e.gamma = gamma;
  e.t_used = t_used;
  return e;
}

ProportionEstimate estimate_eps_known_null(const Sample& sample, double gamma) {
  sample.validate();
  check_gamma(gamma);
  return eps_cosine_sum(sample.values, gamma);
}

ProportionEstimate estimate_eps_standardized(const Sample& sample, double gamma,
                                             const NullParams& null_params) {
  sample.validate();
  check_gamma(gamma);
  null_params.validate();
  std::vector<double> z(sample.values.size());
  for (std::size_t j = 0; j < z.size(); ++j) {
    z[j] = (sample.values[j] - null_params.u0) / null_params.sigma0;
  }
  return eps_cosine_sum(z, gamma);
}

ProportionEstimate estimate_eps_plugin(const Sample& sample, double gamma) {
  const NullParams null_params = estimate_null(sample, gamma);
  return estimate_eps_standardized(sample, gamma, null_params);
}

double WeightDensity::operator()(double xi) const {
  if (std::abs(xi) >= 1.0) return 0.0;
  switch (kind) {
    case WeightKind::uniform: return 0.5;
    case WeightKind::triangle: return 1.0 - std::abs(xi);
    case WeightKind::smooth:
      return kSmoothNorm * std::exp(-1.0 / (1.0 - xi * xi));
  }
  return 0.0;
}

ProportionEstimate phase_function_estimator(const Sample& sample, double gamma,
                                            const WeightDensity& omega) {
  sample.validate();
  check_gamma(gamma);
  const double n = static_cast<double>(sample.size());
  const double t = std::sqrt(2.0 * gamma * std::log(n));

  auto integrand = [&](double xi) {
    const double w = omega(xi);
    if (w == 0.0) return 0.0;
    return w * std::exp(0.5 * t * t * xi * xi) * ecf_eval(sample, t * xi).real();
  };
  double error = 0.0;
  const double psi_re = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      integrand, -1.0, 1.0, 12, 1e-9, &error);
  if (!(std::isfinite(psi_re)) || (psi_re != 0.0 && error / std::abs(psi_re) > 1e-6)) {
    fail(errc::numerical_integration, "phase-function quadrature did not converge");
  }
  return make_proportion_estimate(1.0 - psi_re, gamma, t);
}

}  // namespace nullfreq
