#include "nullfreq/ecf.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

namespace nullfreq {

const char* errc_name(errc code) {
  switch (code) {
    case errc::invalid_input: return "invalid input";
    case errc::threshold_not_found: return "threshold not found";
    case errc::nonpositive_variance: return "nonpositive variance";
    case errc::degenerate_modulus: return "degenerate modulus";
    case errc::unsupported_model: return "unsupported model";
    case errc::numerical_integration: return "numerical integration failure";
    case errc::divergence: return "divergence";
    case errc::level_overflow: return "level overflow";
    case errc::density_support: return "density support error";
    case errc::degenerate_sample: return "degenerate sample";
    case errc::construction_failed: return "construction failed";
    case errc::parse_error: return "parse error";
  }
  return "error";
}

void Sample::validate() const {
  if (values.empty()) fail(errc::invalid_input, "sample is empty");
  for (double v : values) {
    if (!std::isfinite(v)) fail(errc::invalid_input, "non-finite sample value");
  }
  if (truth && truth->size() != values.size()) {
    fail(errc::invalid_input, "truth indicator length mismatch");
  }
}

void NullParams::validate() const {
  if (!std::isfinite(u0) || !std::isfinite(sigma0) || sigma0 <= 0.0) {
    fail(errc::invalid_input, "null params require finite u0 and sigma0 > 0");
  }
}

namespace {

// Pairwise reduction keeps the summation error O(log n) and the result
// independent of the caller's threading.
template <typename F>
double pairwise_sum(std::size_t lo, std::size_t hi, const F& term) {
  const std::size_t len = hi - lo;
  if (len <= 16) {
    double s = 0.0;
    for (std::size_t j = lo; j < hi; ++j) s += term(j);
    return s;
  }
  const std::size_t mid = lo + len / 2;
  return pairwise_sum(lo, mid, term) + pairwise_sum(mid, hi, term);
}

}  // namespace

std::complex<double> ecf_eval(const Sample& sample, double t) {
  sample.validate();
  if (!std::isfinite(t)) fail(errc::invalid_input, "non-finite frequency");
  const auto& x = sample.values;
  const double n = static_cast<double>(x.size());
  const double re = pairwise_sum(0, x.size(), [&](std::size_t j) { return std::cos(t * x[j]); });
  const double im = pairwise_sum(0, x.size(), [&](std::size_t j) { return std::sin(t * x[j]); });
  return {re / n, im / n};
}

std::complex<double> ecf_deriv(const Sample& sample, double t) {
  sample.validate();
  if (!std::isfinite(t)) fail(errc::invalid_input, "non-finite frequency");
  const auto& x = sample.values;
  const double n = static_cast<double>(x.size());
  // (i/n) sum x_j e^{itx_j} = (-1/n) sum x_j sin + (i/n) sum x_j cos
  const double re = -pairwise_sum(0, x.size(), [&](std::size_t j) { return x[j] * std::sin(t * x[j]); });
  const double im = pairwise_sum(0, x.size(), [&](std::size_t j) { return x[j] * std::cos(t * x[j]); });
  return {re / n, im / n};
}

CfHandle make_ecf_handle(const Sample& sample) {
  sample.validate();
  auto values = sample.values;  // own a copy; handles outlive callers' samples
  auto shared = std::make_shared<Sample>(Sample{std::move(values), std::nullopt});
  return CfHandle{
      [shared](double t) { return ecf_eval(*shared, t); },
      [shared](double t) { return ecf_deriv(*shared, t); },
  };
}

namespace {

constexpr double kScanStep = 0.01;
constexpr double kBisectTol = 1e-10;

struct ScanState {
  // Incremental rotation e^{i(t+h)x} = e^{itx} e^{ihx}; exact trig is used
  // to confirm brackets and during bisection, so drift only steers the scan.
  std::vector<double> re, im, rot_re, rot_im;

  explicit ScanState(const std::vector<double>& x) {
    const std::size_t n = x.size();
    re.resize(n);
    im.resize(n);
    rot_re.resize(n);
    rot_im.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      rot_re[j] = std::cos(kScanStep * x[j]);
      rot_im[j] = std::sin(kScanStep * x[j]);
      re[j] = 1.0;
      im[j] = 0.0;
    }
  }

  double advance_and_modulus() {
    const std::size_t n = re.size();
    for (std::size_t j = 0; j < n; ++j) {
      const double r = re[j] * rot_re[j] - im[j] * rot_im[j];
      const double i = re[j] * rot_im[j] + im[j] * rot_re[j];
      re[j] = r;
      im[j] = i;
    }
    const double sr = pairwise_sum(0, n, [&](std::size_t j) { return re[j]; });
    const double si = pairwise_sum(0, n, [&](std::size_t j) { return im[j]; });
    return std::hypot(sr, si) / static_cast<double>(n);
  }
};

template <typename ModFn>
FrequencyThreshold bisect_threshold(double lo, double hi, double level, double gamma,
                                    const ModFn& modulus) {
  while (hi - lo > kBisectTol) {
    const double mid = 0.5 * (lo + hi);
    if (modulus(mid) <= level) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  const double t_hat = 0.5 * (lo + hi);
  return FrequencyThreshold{t_hat, gamma, modulus(t_hat)};
}

template <typename ModFn>
FrequencyThreshold grid_threshold(double level, double gamma, double t_max,
                                  const ModFn& modulus) {
  double prev = 0.0;
  for (double t = kScanStep; t <= t_max; t += kScanStep) {
    if (modulus(t) <= level) {
      return bisect_threshold(prev, t, level, gamma, modulus);
    }
    prev = t;
  }
  fail(errc::threshold_not_found,
       "no |cf| crossing of the n^-gamma level below the search ceiling");
}

}  // namespace

FrequencyThreshold threshold_freq(const Sample& sample, double gamma) {
  sample.validate();
  if (sample.size() < 2) fail(errc::invalid_input, "threshold_freq needs n >= 2");
  if (!(gamma > 0.0 && gamma < 0.5)) fail(errc::invalid_input, "gamma must lie in (0, 1/2)");

  const double n = static_cast<double>(sample.size());
  const double level = std::pow(n, -gamma);
  const double t_max = 3.0 * std::sqrt(2.0 * std::log(n));
  auto exact = [&](double t) { return std::abs(ecf_eval(sample, t)); };

  ScanState scan(sample.values);
  double prev = 0.0;
  for (double t = kScanStep; t <= t_max; t += kScanStep) {
    if (scan.advance_and_modulus() <= level) {
      // Confirm with exact evaluations; the incremental scan is only a guide.
      if (exact(t) > level) continue;
      double lo = prev;
      while (lo > 0.0 && exact(lo) <= level) lo -= kScanStep;
      if (lo < 0.0) lo = 0.0;
      return bisect_threshold(lo, std::min(lo + kScanStep, t), level, gamma, exact);
    }
    prev = t;
  }
  fail(errc::threshold_not_found,
       "no |ecf| crossing of the n^-gamma level below the search ceiling");
}

double deterministic_threshold_freq(const MixtureSpec& spec, std::size_t n, double gamma) {
  if (n < 2) fail(errc::invalid_input, "need n >= 2");
  if (!(gamma > 0.0 && gamma < 0.5)) fail(errc::invalid_input, "gamma must lie in (0, 1/2)");
  if (!spec.analytic_cf_available) {
    fail(errc::unsupported_model, "spec provides no analytic characteristic function");
  }
  const double level = std::pow(static_cast<double>(n), -gamma);
  const double t_max = 3.0 * std::sqrt(2.0 * std::log(static_cast<double>(n)));
  auto modulus = [&](double t) { return std::abs(model_cf(spec, t)); };
  return grid_threshold(level, gamma, t_max, modulus).t_hat;
}

CfHandle make_model_handle(const MixtureSpec& spec) {
  return CfHandle{
      [spec](double t) { return model_cf(spec, t); },
      [spec](double t) { return model_cf_deriv(spec, t); },
  };
}

}  // namespace nullfreq
