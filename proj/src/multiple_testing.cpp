#include "nullfreq/multiple_testing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nullfreq {

namespace {

double normal_kernel(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
}

constexpr std::size_t kExactKdeCutoff = 2000;
constexpr std::size_t kKdeGridSize = 4096;
constexpr double kKernelReach = 8.0;  // kernel support cutoff in bandwidths

double quantile(std::vector<double> sorted, double q) {
  const double pos = q * (static_cast<double>(sorted.size()) - 1.0);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

RejectionSet bh_stepup(const PValueVector& pvals, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) fail(errc::invalid_input, "alpha must lie in (0, 1)");
  const std::size_t n = pvals.size();
  if (n == 0) fail(errc::invalid_input, "empty p-value vector");
  std::vector<double> sorted(pvals.values);
  std::sort(sorted.begin(), sorted.end());
  double cutoff = -1.0;
  for (std::size_t k = n; k >= 1; --k) {
    if (sorted[k - 1] <= alpha * static_cast<double>(k) / static_cast<double>(n)) {
      cutoff = sorted[k - 1];
      break;
    }
  }
  RejectionSet out;
  out.rejected.assign(n, false);
  if (cutoff >= 0.0) {
    for (std::size_t j = 0; j < n; ++j) {
      if (pvals.values[j] <= cutoff) {
        out.rejected[j] = true;
        ++out.count;
      }
    }
  }
  return out;
}

RejectionSet adaptive_bh(const PValueVector& pvals, double alpha,
                         const ProportionEstimate& eps_hat) {
  if (eps_hat.clamped > 1.0 - 1e-6) {
    fail(errc::level_overflow, "estimated proportion too close to 1");
  }
  return bh_stepup(pvals, alpha / (1.0 - eps_hat.clamped));
}

double DensityEstimate::operator()(double x) const {
  if (exact) {
    double s = 0.0;
    for (double xi : points) s += normal_kernel((x - xi) / bandwidth);
    return s / (static_cast<double>(points.size()) * bandwidth);
  }
  const double pos = (x - grid_lo) / grid_step;
  if (pos < 0.0 || pos > static_cast<double>(density.size() - 1)) {
    // Off-grid queries fall back to the exact sum (the grid spans the data
    // plus kKernelReach bandwidths, so this is the far-tail case).
    double s = 0.0;
    for (double xi : points) {
      const double z = (x - xi) / bandwidth;
      if (std::abs(z) < kKernelReach) s += normal_kernel(z);
    }
    return s / (static_cast<double>(points.size()) * bandwidth);
  }
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, density.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return density[lo] * (1.0 - frac) + density[hi] * frac;
}

BandwidthRule BandwidthRule::loo_cv(std::vector<double> grid) {
  if (grid.empty()) fail(errc::invalid_input, "empty bandwidth grid");
  BandwidthRule rule;
  rule.kind = Kind::loo_cv;
  rule.grid = std::move(grid);
  return rule;
}

namespace {

double silverman_bandwidth(const Sample& sample) {
  const auto& x = sample.values;
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  std::vector<double> sorted(x);
  std::sort(sorted.begin(), sorted.end());
  const double iqr = quantile(sorted, 0.75) - quantile(sorted, 0.25);
  double spread = std::min(sd, iqr / 1.34);
  if (spread <= 0.0) spread = std::max(sd, iqr / 1.34);
  double level = 0.0;
  for (double v : x) level = std::max(level, std::abs(v));
  if (spread <= 1e-12 * (1.0 + level)) {
    fail(errc::degenerate_sample, "zero-variance sample");
  }
  return 0.9 * spread * std::pow(n, -0.2);
}

DensityEstimate binned_kde(const Sample& sample, double h) {
  const auto& x = sample.values;
  const double n = static_cast<double>(x.size());
  const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
  DensityEstimate est;
  est.bandwidth = h;
  est.points = x;
  est.grid_lo = *mn - kKernelReach * h;
  const double grid_hi = *mx + kKernelReach * h;
  est.grid_step = (grid_hi - est.grid_lo) / static_cast<double>(kKdeGridSize - 1);

  // Linear binning followed by an exact kernel pass over the grid.
  std::vector<double> bin(kKdeGridSize, 0.0);
  for (double v : x) {
    const double pos = (v - est.grid_lo) / est.grid_step;
    const std::size_t lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    bin[lo] += 1.0 - frac;
    bin[std::min(lo + 1, kKdeGridSize - 1)] += frac;
  }
  const long reach = static_cast<long>(std::ceil(kKernelReach * h / est.grid_step));
  std::vector<double> taps(static_cast<std::size_t>(reach) + 1);
  for (long d = 0; d <= reach; ++d) {
    taps[static_cast<std::size_t>(d)] =
        normal_kernel(static_cast<double>(d) * est.grid_step / h);
  }
  est.density.assign(kKdeGridSize, 0.0);
  for (std::size_t i = 0; i < kKdeGridSize; ++i) {
    if (bin[i] == 0.0) continue;
    const long ilo = std::max<long>(0, static_cast<long>(i) - reach);
    const long ihi = std::min<long>(kKdeGridSize - 1, static_cast<long>(i) + reach);
    for (long jj = ilo; jj <= ihi; ++jj) {
      est.density[static_cast<std::size_t>(jj)] +=
          bin[i] * taps[static_cast<std::size_t>(std::labs(jj - static_cast<long>(i)))];
    }
  }
  for (double& d : est.density) d /= n * h;
  return est;
}

double loo_log_likelihood(const Sample& sample, const DensityEstimate& est) {
  const double n = static_cast<double>(sample.size());
  const double self = normal_kernel(0.0) / (n * est.bandwidth);
  double ll = 0.0;
  for (double v : sample.values) {
    const double f = (est(v) - self) * n / (n - 1.0);
    ll += std::log(std::max(f, 1e-300));
  }
  return ll;
}

}  // namespace

BandwidthRule BandwidthRule::loo_cv_default(const Sample& sample) {
  const double h0 = silverman_bandwidth(sample);
  std::vector<double> grid(20);
  // 20 log-spaced candidates spanning a factor of 16 around Silverman.
  for (int i = 0; i < 20; ++i) {
    grid[static_cast<std::size_t>(i)] =
        h0 * std::pow(2.0, -2.0 + 4.0 * static_cast<double>(i) / 19.0);
  }
  return loo_cv(std::move(grid));
}

DensityEstimate kde(const Sample& sample, const BandwidthRule& rule) {
  sample.validate();
  if (sample.size() < 10) fail(errc::invalid_input, "kde needs n >= 10");

  auto build = [&](double h) -> DensityEstimate {
    if (sample.size() <= kExactKdeCutoff) {
      DensityEstimate est;
      est.exact = true;
      est.bandwidth = h;
      est.points = sample.values;
      return est;
    }
    return binned_kde(sample, h);
  };

  if (rule.kind == BandwidthRule::Kind::silverman) {
    return build(silverman_bandwidth(sample));
  }
  double best_h = rule.grid.front();
  double best_ll = -std::numeric_limits<double>::infinity();
  for (double h : rule.grid) {
    if (!(h > 0.0)) fail(errc::invalid_input, "bandwidth grid must be positive");
    const auto est = build(h);
    const double ll = loo_log_likelihood(sample, est);
    if (ll > best_ll) {
      best_ll = ll;
      best_h = h;
    }
  }
  return build(best_h);
}

std::vector<double> lfdr_values(const Sample& sample, const ProportionEstimate& eps_hat,
                                const NullParams& null_params,
                                const DensityEstimate& f_tilde) {
  sample.validate();
  null_params.validate();
  std::vector<double> lfdr(sample.size());
  const double s0 = null_params.sigma0;
  for (std::size_t j = 0; j < sample.size(); ++j) {
    const double x = sample.values[j];
    const double f = f_tilde(x);
    if (!(f > 0.0)) fail(errc::density_support, "marginal density estimate vanishes at a sample point");
    const double z = (x - null_params.u0) / s0;
    const double f0 = std::exp(-0.5 * z * z) / (s0 * std::sqrt(2.0 * M_PI));
    lfdr[j] = std::min(1.0, (1.0 - eps_hat.clamped) * f0 / f);
  }
  return lfdr;
}

RejectionSet adaptz_from_lfdr(const std::vector<double>& lfdr, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) fail(errc::invalid_input, "alpha must lie in (0, 1)");
  const std::size_t n = lfdr.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return lfdr[a] < lfdr[b]; });
  double running = 0.0;
  std::size_t k_star = 0;
  for (std::size_t k = 0; k < n; ++k) {
    running += lfdr[order[k]];
    if (running <= alpha * static_cast<double>(k + 1)) k_star = k + 1;
  }
  // Ties at the threshold value are rejected together.
  while (k_star > 0 && k_star < n && lfdr[order[k_star]] == lfdr[order[k_star - 1]]) {
    ++k_star;
  }
  RejectionSet out;
  out.rejected.assign(n, false);
  for (std::size_t k = 0; k < k_star; ++k) out.rejected[order[k]] = true;
  out.count = static_cast<int>(k_star);
  return out;
}

RejectionSet adaptz(const Sample& sample, double alpha, const ProportionEstimate& eps_hat,
                    const NullParams& null_params, const DensityEstimate& f_tilde) {
  return adaptz_from_lfdr(lfdr_values(sample, eps_hat, null_params, f_tilde), alpha);
}

double evaluate_fdp(const RejectionSet& rejections, const std::vector<bool>& truth) {
  if (truth.size() != rejections.rejected.size()) {
    fail(errc::invalid_input, "truth indicator length mismatch");
  }
  int false_rej = 0;
  for (std::size_t j = 0; j < truth.size(); ++j) {
    if (rejections.rejected[j] && !truth[j]) ++false_rej;
  }
  return static_cast<double>(false_rej) / std::max(1, rejections.count);
}

}  // namespace nullfreq
