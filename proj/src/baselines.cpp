#include "nullfreq/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nullfreq {

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

PValueVector pvalues_from_null(const Sample& sample, const NullParams& null_params) {
  sample.validate();
  null_params.validate();
  PValueVector p;
  p.values.resize(sample.size());
  for (std::size_t j = 0; j < sample.size(); ++j) {
    const double z = std::abs(sample.values[j] - null_params.u0) / null_params.sigma0;
    p.values[j] = std::erfc(z / std::sqrt(2.0));  // 2 (1 - Phi(z))
  }
  return p;
}

ProportionEstimate storey_estimator(const PValueVector& pvals, double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) fail(errc::invalid_input, "lambda must lie in (0, 1)");
  if (pvals.values.empty()) fail(errc::invalid_input, "empty p-value vector");
  const double n = static_cast<double>(pvals.size());
  std::size_t above = 0;
  for (double p : pvals.values) {
    if (p > lambda) ++above;
  }
  const double pi0 = static_cast<double>(above) / ((1.0 - lambda) * n);
  return make_proportion_estimate(1.0 - pi0, 0.0, lambda);
}

namespace {

struct QuadraticFit {
  double a, b, c;
};

// Weighted least squares of y ~ a + b x + c x^2.
QuadraticFit wls_quadratic(const std::vector<double>& x, const std::vector<double>& y,
                           const std::vector<double>& w) {
  double m[3][3] = {};
  double r[3] = {};
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double p[3] = {1.0, x[i], x[i] * x[i]};
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) m[a][b] += w[i] * p[a] * p[b];
      r[a] += w[i] * p[a] * y[i];
    }
  }
  // Gaussian elimination with partial pivoting on the 3x3 system.
  int idx[3] = {0, 1, 2};
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int row = col + 1; row < 3; ++row) {
      if (std::abs(m[idx[row]][col]) > std::abs(m[idx[piv]][col])) piv = row;
    }
    std::swap(idx[col], idx[piv]);
    if (m[idx[col]][col] == 0.0) fail(errc::divergence, "singular central-window fit");
    for (int row = col + 1; row < 3; ++row) {
      const double f = m[idx[row]][col] / m[idx[col]][col];
      for (int k = col; k < 3; ++k) m[idx[row]][k] -= f * m[idx[col]][k];
      r[idx[row]] -= f * r[idx[col]];
    }
  }
  double sol[3];
  for (int col = 2; col >= 0; --col) {
    double acc = r[idx[col]];
    for (int k = col + 1; k < 3; ++k) acc -= m[idx[col]][k] * sol[k];
    sol[col] = acc / m[idx[col]][col];
  }
  return {sol[0], sol[1], sol[2]};
}

}  // namespace

EfronEstimate efron_estimator(const Sample& sample) {
  sample.validate();
  const std::size_t n = sample.size();
  if (n < 500) fail(errc::invalid_input, "central matching needs n >= 500");

  const auto& x = sample.values;
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sd > 0.0)) fail(errc::divergence, "zero-variance input");

  // Scott's rule, bin origin anchored at the median so location shifts move
  // the histogram rigidly.
  std::vector<double> sorted(x);
  std::sort(sorted.begin(), sorted.end());
  const double median = 0.5 * (sorted[(n - 1) / 2] + sorted[n / 2]);
  const double h = 3.49 * sd * std::pow(static_cast<double>(n), -1.0 / 3.0);
  const double lo = sorted.front(), hi = sorted.back();
  const long jlo = static_cast<long>(std::floor((lo - median) / h));
  const long jhi = static_cast<long>(std::floor((hi - median) / h));
  const std::size_t nbins = static_cast<std::size_t>(jhi - jlo + 1);
  std::vector<double> counts(nbins, 0.0);
  for (double v : x) {
    long j = static_cast<long>(std::floor((v - median) / h)) - jlo;
    if (j < 0) j = 0;
    if (j >= static_cast<long>(nbins)) j = static_cast<long>(nbins) - 1;
    counts[static_cast<std::size_t>(j)] += 1.0;
  }

  const std::size_t mode =
      static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
  const double half = 0.5 * counts[mode];
  std::size_t wlo = mode, whi = mode;
  while (wlo > 0 && counts[wlo - 1] >= half) --wlo;
  while (whi + 1 < nbins && counts[whi + 1] >= half) ++whi;
  if (whi - wlo + 1 < 3) fail(errc::divergence, "central window has fewer than 3 bins");

  std::vector<double> centers, logc, weights;
  for (std::size_t j = wlo; j <= whi; ++j) {
    centers.push_back(median + (static_cast<double>(jlo + static_cast<long>(j)) + 0.5) * h);
    logc.push_back(std::log(counts[j]));
    weights.push_back(counts[j]);  // Poisson: Var(log c) ~ 1/c
  }
  const auto fit = wls_quadratic(centers, logc, weights);
  if (!(fit.c < 0.0)) fail(errc::divergence, "central log-count fit has nonnegative curvature");

  const double u0 = -fit.b / (2.0 * fit.c);
  const double sigma0_sq = -1.0 / (2.0 * fit.c);
  const double sigma0 = std::sqrt(sigma0_sq);
  // Peak height against total mass: (1-eps)/(sigma0 sqrt(2pi)) = peak density.
  const double log_peak = fit.a - fit.b * fit.b / (4.0 * fit.c);
  const double peak_density = std::exp(log_peak) / (static_cast<double>(n) * h);
  const double eps_raw = 1.0 - peak_density * sigma0 * std::sqrt(2.0 * M_PI);

  EfronEstimate out;
  out.null_params = NullParams{u0, sigma0};
  out.sigma0_sq = sigma0_sq;
  out.eps = make_proportion_estimate(eps_raw, 0.0, 0.0);
  return out;
}

}  // namespace nullfreq
