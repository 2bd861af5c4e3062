#include "nullfreq/null_estimation.hpp"

#include <cmath>

namespace nullfreq {

namespace {

constexpr double kModulusFloor = 1e-300;

void check_functional_input(const std::complex<double>& v, double t) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    fail(errc::invalid_input, "functional frequency must be positive and finite");
  }
  if (std::abs(v) < kModulusFloor) {
    fail(errc::degenerate_modulus, "|xi(t)| below 1e-300");
  }
}

}  // namespace

double sigma_functional(const CfHandle& xi, double t) {
  const auto v = xi.value(t);
  check_functional_input(v, t);
  const auto d = xi.deriv(t);
  const double mod2 = std::norm(v);
  return -(std::conj(v) * d).real() / (t * mod2);
}

double mean_functional(const CfHandle& xi, double t) {
  const auto v = xi.value(t);
  check_functional_input(v, t);
  const auto d = xi.deriv(t);
  return (std::conj(v) * d).imag() / std::norm(v);
}

NullEstimate estimate_null_detail(const Sample& sample, double gamma) {
  const auto threshold = threshold_freq(sample, gamma);
  const auto handle = make_ecf_handle(sample);
  const double sigma0_sq = sigma_functional(handle, threshold.t_hat);
  const double u0 = mean_functional(handle, threshold.t_hat);
  if (!(sigma0_sq > 0.0)) {
    fail(errc::nonpositive_variance,
         "sigma0^2 estimate is not positive; lower gamma or increase n");
  }
  return NullEstimate{NullParams{u0, std::sqrt(sigma0_sq)}, sigma0_sq, threshold};
}

NullParams estimate_null(const Sample& sample, double gamma) {
  return estimate_null_detail(sample, gamma).params;
}

}  // namespace nullfreq
