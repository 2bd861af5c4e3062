#include "nullfreq/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <thread>

#include "nullfreq/null_estimation.hpp"
#include "nullfreq/rng.hpp"

namespace nullfreq {

Sample gen_gaussian_mixture(const MixtureSpec& spec, std::size_t n, std::uint64_t seed) {
  spec.validate();
  if (n == 0) fail(errc::invalid_input, "need n >= 1");
  RngStream rng(seed);
  Sample s;
  s.values.resize(n);
  s.truth = std::vector<bool>(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (rng.bernoulli(spec.eps)) {
      const auto& law = rng.bernoulli(0.5) ? spec.mu1 : spec.mu2;
      const double mu = rng.uniform(law.lo, law.hi);
      s.values[i] = mu + spec.scale * rng.normal();
      (*s.truth)[i] = true;
    } else {
      s.values[i] = spec.null_params.u0 + spec.null_params.sigma0 * rng.normal();
    }
  }
  return s;
}

Sample gen_double_exp_mixture(const MixtureSpec& spec, std::size_t n, std::uint64_t seed) {
  spec.validate();
  if (n == 0) fail(errc::invalid_input, "need n >= 1");
  RngStream rng(seed);
  Sample s;
  s.values.resize(n);
  s.truth = std::vector<bool>(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (rng.bernoulli(spec.eps)) {
      const auto& law = rng.bernoulli(0.5) ? spec.mu1 : spec.mu2;
      const double mu = rng.uniform(law.lo, law.hi);
      s.values[i] = rng.laplace(mu, spec.scale);
      (*s.truth)[i] = true;
    } else {
      s.values[i] = spec.null_params.u0 + spec.null_params.sigma0 * rng.normal();
    }
  }
  return s;
}

Sample gen_block_dependent(const MixtureSpec& spec, std::size_t n, int block_len,
                           std::uint64_t seed) {
  spec.validate();
  if (n < 10) fail(errc::invalid_input, "need n >= 10");
  if (block_len < 0) fail(errc::invalid_input, "block length must be >= 0");
  const std::size_t L = static_cast<std::size_t>(block_len);
  RngStream rng(seed);
  std::vector<double> w(n + L);
  for (double& v : w) v = rng.normal();
  const double norm = 1.0 / std::sqrt(static_cast<double>(L + 1));
  std::vector<double> z(n);
  double window = 0.0;
  for (std::size_t l = 0; l <= L; ++l) window += w[l];
  for (std::size_t j = 0; j < n; ++j) {
    z[j] = norm * window;
    if (j + 1 < n) window += w[j + 1 + L] - w[j];
  }

  // 80/10/10 split, scaled proportionally when n != 10^4.
  const std::size_t n_null = static_cast<std::size_t>(std::llround(0.8 * static_cast<double>(n)));
  const std::size_t n_one = static_cast<std::size_t>(std::llround(0.1 * static_cast<double>(n)));
  Sample s;
  s.values.resize(n);
  s.truth = std::vector<bool>(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (i < n_null) {
      s.values[i] = z[i];
    } else if (i < n_null + n_one) {
      s.values[i] = rng.uniform(spec.mu1.lo, spec.mu1.hi) + spec.scale * z[i];
      (*s.truth)[i] = true;
    } else {
      s.values[i] = rng.uniform(spec.mu2.lo, spec.mu2.hi) + spec.scale * z[i];
      (*s.truth)[i] = true;
    }
  }
  return s;
}

Sample gen_sample(const MixtureSpec& spec, std::size_t n, std::uint64_t seed) {
  if (spec.kind == NonnullKind::gaussian_two_component) {
    return gen_gaussian_mixture(spec, n, seed);
  }
  return gen_double_exp_mixture(spec, n, seed);
}

namespace {

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("NULLFREQ_WORKERS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

template <typename Fn>
void parallel_for(int count, int workers, const Fn& fn) {
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

std::vector<double> arange(double lo, double hi, double step) {
  std::vector<double> out;
  for (double v = lo; v <= hi + 1e-12; v += step) out.push_back(v);
  return out;
}

const UniformLaw kMu1{-0.9, -0.1};
const UniformLaw kMu2{0.5, 1.5};

// Per-replication estimator outcome: value or counted failure.
struct Outcome {
  double value = 0.0;
  bool ok = false;
};

EstimatorStats summarize(const std::string& name, const std::vector<Outcome>& outcomes,
                         double truth) {
  EstimatorStats st;
  st.estimator = name;
  std::vector<double> sq;
  double mean = 0.0;
  for (const auto& o : outcomes) {
    if (!o.ok) {
      ++st.failures;
      continue;
    }
    sq.push_back((o.value - truth) * (o.value - truth));
    mean += o.value;
  }
  st.used = static_cast<int>(sq.size());
  if (!sq.empty()) {
    const double m = std::accumulate(sq.begin(), sq.end(), 0.0) / static_cast<double>(sq.size());
    st.mse = m;
    st.mean_value = mean / static_cast<double>(sq.size());
    double var = 0.0;
    for (double v : sq) var += (v - m) * (v - m);
    st.se = sq.size() > 1
                ? std::sqrt(var / (static_cast<double>(sq.size()) - 1.0) /
                            static_cast<double>(sq.size()))
                : 0.0;
  }
  return st;
}

}  // namespace

void SettingConfig::validate() const {
  static const char* known[] = {"1", "2", "3a", "3b", "4a", "4b", "4c", "5a", "5b", "5c"};
  if (std::find_if(std::begin(known), std::end(known),
                   [&](const char* k) { return id == k; }) == std::end(known)) {
    fail(errc::invalid_input, "unknown setting id: " + id);
  }
  if (replications < 1) fail(errc::invalid_input, "replications must be >= 1");
  if (n < 10) fail(errc::invalid_input, "n must be >= 10");
  if (!(gamma > 0.0 && gamma < 0.5)) fail(errc::invalid_input, "gamma must lie in (0, 1/2)");
  if (sweep.empty()) fail(errc::invalid_input, "empty sweep grid");
}

SettingConfig default_setting_config(const std::string& id) {
  SettingConfig cfg;
  cfg.id = id;
  if (id == "1") {
    cfg.sweep_name = "gamma";
    cfg.sweep = arange(0.08, 0.38, 0.03);
  } else if (id == "2") {
    cfg.sweep_name = "n";
    cfg.sweep = {2000, 5000, 10000, 15000, 20000, 50000, 100000, 500000};
  } else if (id == "3a" || id == "4a" || id == "5a") {
    cfg.sweep_name = "eps";
    cfg.sweep = arange(0.03, 0.30, 0.03);
  } else if (id == "3b" || id == "5b") {
    cfg.sweep_name = "sigma";
    cfg.sweep = arange(1.2, 2.1, 0.1);
  } else if (id == "4b") {
    cfg.sweep_name = "tau";
    cfg.sweep = arange(1.2, 2.1, 0.1);
  } else if (id == "4c") {
    cfg.sweep_name = "L";
    cfg.sweep = {0, 10, 20, 30, 40, 50};
  } else if (id == "5c") {
    cfg.sweep_name = "sigma0";
    cfg.sweep = arange(0.5, 1.0, 0.1);
  } else {
    fail(errc::invalid_input, "unknown setting id: " + id);
  }
  cfg.validate();
  return cfg;
}

MSEReport run_setting(const SettingConfig& config) {
  config.validate();
  const int workers = resolve_workers(config.workers);
  MSEReport report;
  report.config = config;

  for (std::size_t gi = 0; gi < config.sweep.size(); ++gi) {
    const double v = config.sweep[gi];
    const double gamma = config.sweep_name == "gamma" ? v : config.gamma;
    const std::size_t n =
        config.sweep_name == "n" ? static_cast<std::size_t>(v) : config.n;

    MixtureSpec spec = MixtureSpec::setting1();
    double true_eps = 0.2;
    int block_len = -1;
    if (config.id == "1" || config.id == "2") {
      // base spec
    } else if (config.id == "3a" || config.id == "4a") {
      true_eps = v;
      spec = config.id == "3a"
                 ? MixtureSpec::gaussian(v, {0.0, 1.0}, kMu1, kMu2, 1.2)
                 : MixtureSpec::double_exp(v, {0.0, 1.0}, kMu1, kMu2, 1.2);
    } else if (config.id == "3b") {
      spec = MixtureSpec::gaussian(0.2, {0.0, 1.0}, kMu1, kMu2, v);
    } else if (config.id == "4b") {
      spec = MixtureSpec::double_exp(0.2, {0.0, 1.0}, kMu1, kMu2, v);
    } else if (config.id == "4c") {
      spec = MixtureSpec::gaussian(0.2, {0.0, 1.0}, kMu1, kMu2, 1.2);
      block_len = static_cast<int>(v);
    } else {
      fail(errc::invalid_input, "setting " + config.id + " is a testing setting");
    }

    const bool plugin_family =
        config.id == "1" || config.id == "2" || config.id == "4b";
    const bool known_null_cj = config.id == "3a" || config.id == "4a";
    const bool with_competitors =
        config.id == "3a" || config.id == "3b" || config.id == "4a";
    const bool setting_4c = config.id == "4c";

    const int reps = config.replications;
    std::vector<Outcome> eps_cj(reps), u0_cj(reps), s2_cj(reps);
    std::vector<Outcome> eps_storey(reps), eps_efron(reps), u0_efron(reps), s2_efron(reps);

    parallel_for(reps, workers, [&](int rep) {
      const std::uint64_t seed =
          derive_seed(config.seed, gi, static_cast<std::uint64_t>(rep));
      const Sample sample = block_len >= 0
                                ? gen_block_dependent(spec, n, block_len, seed)
                                : gen_sample(spec, n, seed);
      if (known_null_cj) {
        try {
          eps_cj[rep] = {estimate_eps_known_null(sample, gamma).clamped, true};
        } catch (const Error&) {
        }
      } else {
        try {
          const auto detail = estimate_null_detail(sample, gamma);
          u0_cj[rep] = {detail.params.u0, true};
          s2_cj[rep] = {detail.sigma0_sq, true};
          eps_cj[rep] = {
              estimate_eps_standardized(sample, gamma, detail.params).clamped, true};
        } catch (const Error&) {
        }
      }
      if (with_competitors) {
        try {
          const auto p = pvalues_from_null(sample, {0.0, 1.0});
          eps_storey[rep] = {storey_estimator(p, 0.5).clamped, true};
        } catch (const Error&) {
        }
      }
      if (with_competitors || setting_4c) {
        try {
          const auto ef = efron_estimator(sample);
          eps_efron[rep] = {ef.eps.clamped, true};
          u0_efron[rep] = {ef.null_params.u0, true};
          s2_efron[rep] = {ef.sigma0_sq, true};
        } catch (const Error&) {
        }
      }
    });

    MseRow row;
    row.grid_value = v;
    const char* cj_eps_name = known_null_cj ? "eps_cj" : "eps_star";
    row.stats.push_back(summarize(cj_eps_name, eps_cj, true_eps));
    if (plugin_family || setting_4c) {
      row.stats.push_back(summarize("u0", u0_cj, 0.0));
      row.stats.push_back(summarize("sigma0_sq", s2_cj, 1.0));
    }
    if (with_competitors) {
      row.stats.push_back(summarize("eps_storey", eps_storey, true_eps));
      row.stats.push_back(summarize("eps_efron", eps_efron, true_eps));
    }
    if (setting_4c) {
      row.stats.push_back(summarize("eps_efron", eps_efron, true_eps));
      row.stats.push_back(summarize("u0_efron", u0_efron, 0.0));
      row.stats.push_back(summarize("sigma0_sq_efron", s2_efron, 1.0));
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string to_string(Procedure p) {
  return p == Procedure::adaptive_bh ? "adaptive_bh" : "adaptz";
}

std::string to_string(EstimatorChoice c) {
  switch (c) {
    case EstimatorChoice::cj: return "cj";
    case EstimatorChoice::storey: return "storey";
    case EstimatorChoice::efron: return "efron";
    case EstimatorChoice::oracle: return "oracle";
  }
  return "?";
}

FDRReport run_testing_setting(const SettingConfig& config, Procedure procedure,
                              const std::vector<EstimatorChoice>& estimators,
                              double alpha) {
  config.validate();
  if (config.id != "5a" && config.id != "5b" && config.id != "5c") {
    fail(errc::invalid_input, "testing settings are 5a, 5b, 5c");
  }
  const int workers = resolve_workers(config.workers);
  FDRReport report;
  report.config = config;
  report.procedure = procedure;
  report.alpha = alpha;

  const std::size_t n_est = estimators.size();
  for (std::size_t gi = 0; gi < config.sweep.size(); ++gi) {
    const double v = config.sweep[gi];
    MixtureSpec spec = MixtureSpec::setting1();
    double true_eps = 0.2;
    NullParams true_null{0.0, 1.0};
    if (config.id == "5a") {
      true_eps = v;
      spec = MixtureSpec::gaussian(v, true_null, kMu1, kMu2, 1.2);
    } else if (config.id == "5b") {
      spec = MixtureSpec::gaussian(0.2, true_null, kMu1, kMu2, v);
    } else {
      true_null = NullParams{0.0, v};
      spec = MixtureSpec::gaussian(0.2, true_null, kMu1, kMu2, 1.3);
    }

    const int reps = config.replications;
    std::vector<std::vector<Outcome>> fdp(n_est, std::vector<Outcome>(reps));
    std::vector<std::vector<double>> rej_counts(n_est, std::vector<double>(reps, 0.0));

    parallel_for(reps, workers, [&](int rep) {
      const std::uint64_t seed =
          derive_seed(config.seed, gi, static_cast<std::uint64_t>(rep));
      const Sample sample = gen_sample(spec, config.n, seed);
      const auto& truth = *sample.truth;

      if (procedure == Procedure::adaptive_bh) {
        const auto pvals = pvalues_from_null(sample, true_null);
        for (std::size_t e = 0; e < n_est; ++e) {
          try {
            ProportionEstimate eps_hat;
            switch (estimators[e]) {
              case EstimatorChoice::cj:
                eps_hat = estimate_eps_standardized(sample, config.gamma, true_null);
                break;
              case EstimatorChoice::storey:
                eps_hat = storey_estimator(pvals, 0.5);
                break;
              case EstimatorChoice::efron:
                eps_hat = efron_estimator(sample).eps;
                break;
              case EstimatorChoice::oracle:
                eps_hat = make_proportion_estimate(true_eps, config.gamma, 0.0);
                break;
            }
            const auto rej = adaptive_bh(pvals, alpha, eps_hat);
            fdp[e][rep] = {evaluate_fdp(rej, truth), true};
            rej_counts[e][rep] = rej.count;
          } catch (const Error&) {
          }
        }
      } else {
        const auto f_tilde = kde(sample, BandwidthRule::loo_cv_default(sample));
        for (std::size_t e = 0; e < n_est; ++e) {
          try {
            ProportionEstimate eps_hat;
            NullParams null_hat = true_null;
            switch (estimators[e]) {
              case EstimatorChoice::cj: {
                const auto detail = estimate_null_detail(sample, config.gamma);
                null_hat = detail.params;
                eps_hat = estimate_eps_standardized(sample, config.gamma, null_hat);
                break;
              }
              case EstimatorChoice::efron: {
                const auto ef = efron_estimator(sample);
                null_hat = ef.null_params;
                eps_hat = ef.eps;
                break;
              }
              case EstimatorChoice::oracle:
                eps_hat = make_proportion_estimate(true_eps, config.gamma, 0.0);
                break;
              case EstimatorChoice::storey:
                fail(errc::invalid_input, "Storey provides no null estimate for AdaptZ");
            }
            const auto rej = adaptz(sample, alpha, eps_hat, null_hat, f_tilde);
            fdp[e][rep] = {evaluate_fdp(rej, truth), true};
            rej_counts[e][rep] = rej.count;
          } catch (const Error&) {
          }
        }
      }
    });

    FdrRow row;
    row.grid_value = v;
    for (std::size_t e = 0; e < n_est; ++e) {
      FdrStats st;
      st.estimator = to_string(estimators[e]);
      std::vector<double> vals, sq;
      double mean_rej = 0.0;
      for (int rep = 0; rep < reps; ++rep) {
        if (!fdp[e][rep].ok) {
          ++st.failures;
          continue;
        }
        vals.push_back(fdp[e][rep].value);
        sq.push_back((fdp[e][rep].value - alpha) * (fdp[e][rep].value - alpha));
        mean_rej += rej_counts[e][rep];
      }
      st.used = static_cast<int>(vals.size());
      if (!vals.empty()) {
        const double nn = static_cast<double>(vals.size());
        st.fdr = std::accumulate(vals.begin(), vals.end(), 0.0) / nn;
        st.mse_fdp = std::accumulate(sq.begin(), sq.end(), 0.0) / nn;
        st.mean_rejections = mean_rej / nn;
        double var_f = 0.0, var_m = 0.0;
        for (double x : vals) var_f += (x - st.fdr) * (x - st.fdr);
        for (double x : sq) var_m += (x - st.mse_fdp) * (x - st.mse_fdp);
        if (vals.size() > 1) {
          st.fdr_se = std::sqrt(var_f / (nn - 1.0) / nn);
          st.mse_fdp_se = std::sqrt(var_m / (nn - 1.0) / nn);
        }
      }
      row.stats.push_back(std::move(st));
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace nullfreq
