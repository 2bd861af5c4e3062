#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "nullfreq/io.hpp"
#include "nullfreq/least_favorable.hpp"
#include "nullfreq/null_estimation.hpp"
#include "nullfreq/proportion.hpp"
#include "nullfreq/simulate.hpp"

namespace nf = nullfreq;
using nlohmann::ordered_json;

namespace {

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) nf::fail(nf::errc::parse_error, "cannot open output file " + path);
  out << text;
}

int scaled_reps(int reps, double scale) {
  return std::max(1, static_cast<int>(std::llround(reps * scale)));
}

// ---- estimate ----------------------------------------------------------

int cmd_estimate(const std::string& input, double gamma, const std::string& null_mode,
                 double u0, double sigma0, const std::string& output) {
  nf::Sample sample;
  sample.values = nf::read_zscore_file(input);

  ordered_json j;
  j["version"] = nf::kVersion;
  j["n"] = sample.size();
  j["gamma"] = gamma;

  nf::NullParams null_params{u0, sigma0};
  if (null_mode == "estimate") {
    const auto detail = nf::estimate_null_detail(sample, gamma);
    null_params = detail.params;
    j["u0"] = detail.params.u0;
    j["sigma0"] = detail.params.sigma0;
    j["sigma0_sq"] = detail.sigma0_sq;
    j["t_hat"] = detail.threshold.t_hat;
    j["null_mode"] = "estimate";
  } else {
    j["u0"] = u0;
    j["sigma0"] = sigma0;
    j["sigma0_sq"] = sigma0 * sigma0;
    nf::Sample std_sample = sample;
    for (double& v : std_sample.values) v = (v - u0) / sigma0;
    j["t_hat"] = nf::threshold_freq(std_sample, gamma).t_hat;
    j["null_mode"] = "known";
  }
  const auto eps = nf::estimate_eps_standardized(sample, gamma, null_params);
  j["eps_raw"] = eps.raw;
  j["eps_clamped"] = eps.clamped;
  j["eps_t_used"] = eps.t_used;

  std::ostringstream cfg;
  cfg << input << "|" << gamma << "|" << null_mode << "|" << u0 << "|" << sigma0;
  j["config_hash"] = nf::hash_hex(nf::fnv1a_hash(cfg.str()));
  write_text(output, j.dump(2) + "\n");
  return 0;
}

// ---- simulate -----------------------------------------------------------

nf::SettingConfig config_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) nf::fail(nf::errc::parse_error, "cannot open config " + path);
  ordered_json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    nf::fail(nf::errc::parse_error, std::string("bad config JSON: ") + e.what());
  }
  if (!j.contains("setting")) nf::fail(nf::errc::parse_error, "config needs \"setting\"");
  nf::SettingConfig cfg = nf::default_setting_config(j.at("setting").get<std::string>());
  static const char* known[] = {"setting", "n",    "replications", "gamma",
                                "sweep",   "seed", "workers"};
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) nf::fail(nf::errc::parse_error, "unknown config key: " + key);
  }
  if (j.contains("n")) cfg.n = j.at("n").get<std::size_t>();
  if (j.contains("replications")) cfg.replications = j.at("replications").get<int>();
  if (j.contains("gamma")) cfg.gamma = j.at("gamma").get<double>();
  if (j.contains("sweep")) cfg.sweep = j.at("sweep").get<std::vector<double>>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("workers")) cfg.workers = j.at("workers").get<int>();
  cfg.validate();
  return cfg;
}

int cmd_simulate(const std::string& config_path, const std::string& setting,
                 double scale, std::uint64_t seed, int workers, double gamma,
                 const std::string& output) {
  nf::SettingConfig cfg = config_path.empty() ? nf::default_setting_config(setting)
                                              : config_from_file(config_path);
  if (config_path.empty()) {
    cfg.seed = seed;
    cfg.workers = workers;
    cfg.gamma = gamma;
    cfg.replications = scaled_reps(cfg.replications, scale);
  }
  std::ostringstream csv;
  if (cfg.id == "5a" || cfg.id == "5b") {
    const auto rep = nf::run_testing_setting(
        cfg, nf::Procedure::adaptive_bh,
        {nf::EstimatorChoice::cj, nf::EstimatorChoice::storey, nf::EstimatorChoice::efron,
         nf::EstimatorChoice::oracle});
    nf::write_fdr_csv(rep, csv);
  } else if (cfg.id == "5c") {
    const auto rep = nf::run_testing_setting(
        cfg, nf::Procedure::adaptz,
        {nf::EstimatorChoice::cj, nf::EstimatorChoice::efron, nf::EstimatorChoice::oracle});
    nf::write_fdr_csv(rep, csv);
  } else {
    const auto rep = nf::run_setting(cfg);
    nf::write_mse_csv(rep, csv);
  }
  write_text(output, csv.str());
  if (!output.empty() && output != "-") {
    write_text(output + ".provenance.json", nf::provenance_json(cfg, "simulate") + "\n");
  }
  return 0;
}

// ---- reproduce ----------------------------------------------------------

int cmd_reproduce(const std::string& target, double scale, std::uint64_t seed,
                  int workers, const std::string& output) {
  std::ostringstream csv;
  auto base = [&](const std::string& id, int reps) {
    nf::SettingConfig cfg = nf::default_setting_config(id);
    cfg.seed = seed;
    cfg.workers = workers;
    cfg.replications = scaled_reps(reps, scale);
    return cfg;
  };

  if (target == "table1") {
    const auto rep = nf::run_setting(base("1", 1000));
    csv << "gamma,mse_eps_star,se_eps_star,paper_eps_star,mse_u0,se_u0,paper_u0,"
           "mse_sigma0_sq,se_sigma0_sq,paper_sigma0_sq\n";
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
      const auto& r = rep.rows[i];
      csv << nf::format_double(r.grid_value);
      const double p1 = nf::paper_tables::kTable1EpsStar[i] * 1e-4;
      const double p2 = nf::paper_tables::kTable1U0[i] * 1e-4;
      const double p3 = nf::paper_tables::kTable1Sigma0Sq[i] * 1e-4;
      const double papers[3] = {p1, p2, p3};
      for (int s = 0; s < 3; ++s) {
        csv << ',' << nf::format_double(r.stats[s].mse) << ','
            << nf::format_double(r.stats[s].se) << ',' << nf::format_double(papers[s]);
      }
      csv << "\n";
    }
  } else if (target == "table2") {
    const auto rep = nf::run_setting(base("2", 1000));
    csv << "n,mse_eps_star,se_eps_star,paper_eps_star,mse_u0,se_u0,paper_u0,"
           "mse_sigma0_sq,se_sigma0_sq,paper_sigma0_sq\n";
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
      const auto& r = rep.rows[i];
      csv << nf::format_double(r.grid_value);
      const double papers[3] = {nf::paper_tables::kTable2EpsStar[i] * 1e-5,
                                nf::paper_tables::kTable2U0[i] * 1e-5,
                                nf::paper_tables::kTable2Sigma0Sq[i] * 1e-5};
      for (int s = 0; s < 3; ++s) {
        csv << ',' << nf::format_double(r.stats[s].mse) << ','
            << nf::format_double(r.stats[s].se) << ',' << nf::format_double(papers[s]);
      }
      csv << "\n";
    }
  } else if (target == "table3" || target == "table4a") {
    const auto rep = nf::run_setting(base(target == "table3" ? "3a" : "4a", 1000));
    csv << "eps,mse_cj,se_cj,paper_cj,mse_storey,se_storey,paper_storey,"
           "mse_efron,se_efron,paper_efron,efron_failures\n";
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
      const auto& r = rep.rows[i];
      // stats order: eps_cj, eps_storey, eps_efron
      const double pcj = target == "table3" ? nf::paper_tables::kTable3aCj[i] * 1e-5
                                            : std::nan("");
      const double pst = target == "table3" ? nf::paper_tables::kTable3aStorey[i] * 1e-5
                                            : std::nan("");
      const double pef = target == "table3" ? nf::paper_tables::kTable3aEfron[i] * 1e-5
                                            : std::nan("");
      csv << nf::format_double(r.grid_value) << ',' << nf::format_double(r.stats[0].mse)
          << ',' << nf::format_double(r.stats[0].se) << ',' << nf::format_double(pcj)
          << ',' << nf::format_double(r.stats[1].mse) << ','
          << nf::format_double(r.stats[1].se) << ',' << nf::format_double(pst) << ','
          << nf::format_double(r.stats[2].mse) << ',' << nf::format_double(r.stats[2].se)
          << ',' << nf::format_double(pef) << ',' << r.stats[2].failures << "\n";
    }
  } else if (target == "table4b" || target == "table4c") {
    const auto rep = nf::run_setting(base(target == "table4b" ? "4b" : "4c", 1000));
    nf::write_mse_csv(rep, csv);
  } else if (target == "table5") {
    const auto rep = nf::run_setting(base("4c", 1000));
    nf::write_mse_csv(rep, csv);
  } else if (target == "fig2") {
    const auto rep = nf::run_testing_setting(
        base("5a", 1000), nf::Procedure::adaptive_bh,
        {nf::EstimatorChoice::cj, nf::EstimatorChoice::storey, nf::EstimatorChoice::efron});
    nf::write_fdr_csv(rep, csv);
  } else if (target == "fig3") {
    const auto rep = nf::run_testing_setting(
        base("5c", 1000), nf::Procedure::adaptz,
        {nf::EstimatorChoice::cj, nf::EstimatorChoice::efron});
    nf::write_fdr_csv(rep, csv);
  } else {
    nf::fail(nf::errc::invalid_input, "unknown reproduce target: " + target);
  }
  write_text(output, csv.str());
  return 0;
}

// ---- lowerbound ---------------------------------------------------------

nf::lf::PairKind parse_kind(const std::string& kind) {
  if (kind == "variance") return nf::lf::PairKind::variance;
  if (kind == "mean") return nf::lf::PairKind::mean;
  if (kind == "proportion") return nf::lf::PairKind::proportion;
  nf::fail(nf::errc::invalid_input, "kind must be variance, mean or proportion");
}

int cmd_lowerbound(const std::string& kind_name, nf::lf::SpaceParams params,
                   double match_tol, const std::string& output,
                   const std::string& dump_csv) {
  const auto kind = parse_kind(kind_name);
  ordered_json j;
  j["kind"] = kind_name;
  j["version"] = nf::kVersion;
  bool all_pass = true;

  const auto pair = nf::lf::build_pair(kind, params);
  j["params"] = {{"alpha", params.alpha}, {"beta", params.beta}, {"eps0", params.eps0},
                 {"q", params.q},         {"a", params.a},       {"A", params.A},
                 {"n", params.n}};
  j["k"] = pair.k;
  j["eta_n"] = pair.eta;
  j["tau_n"] = pair.tau_n;
  j["delta_n"] = pair.delta_n;
  j["vartheta0"] = pair.vartheta0;
  j["theta0"] = pair.theta0;
  j["halvings"] = pair.halvings;

  auto check = [&](const std::string& name, double value, double tol, bool pass) {
    j["checks"][name] = {{"value", value}, {"tolerance", tol}, {"pass", pass}};
    all_pass = all_pass && pass;
  };

  check("what1_at_zero", pair.what_a_at_zero, 1e-8,
        std::abs(pair.what_a_at_zero) <= 1e-8);
  check("w1_integral", pair.w_a_integral, 1e-8, std::abs(pair.w_a_integral) <= 1e-8);
  check("h_a_min", pair.min_h_a, pair.grid.positivity_floor,
        pair.min_h_a >= -pair.grid.positivity_floor);
  check("h_b_min", pair.min_h_b, pair.grid.positivity_floor,
        pair.min_h_b >= -pair.grid.positivity_floor);
  check("h_a_mass", pair.mass_h_a, 1e-6, std::abs(pair.mass_h_a - 1.0) <= 1e-6);
  check("h_b_mass", pair.mass_h_b, 1e-6, std::abs(pair.mass_h_b - 1.0) <= 1e-6);
  check("f_a_mass", pair.mass_f_a, 1e-6, std::abs(pair.mass_f_a - 1.0) <= 1e-6);
  check("f_b_mass", pair.mass_f_b, 1e-6, std::abs(pair.mass_f_b - 1.0) <= 1e-6);

  const auto match = nf::lf::verify_low_freq_match(pair, match_tol);
  check("low_freq_match", match.max_rel, match.tol, match.pass);
  j["checks"]["low_freq_match"]["at_t"] = match.at_t;

  const auto tail = nf::lf::verify_tail(pair);
  check("w1_tail_window_min", tail.wa_scaled_min, 0.8, tail.pass_wa_window);
  check("w1_tail_window_max", tail.wa_scaled_max, 1.2, tail.pass_wa_window);
  check("w2_tail_bound_c", tail.wb_dev_bound_c, 1.0, tail.pass_wb_bound);
  j["checks"]["w2_tail_bound_c"]["slope"] = tail.wb_dev_slope;
  check("f1_heavy_tail_floor", tail.f_floor_c, 0.0, tail.pass_f_floor);

  // chi^2 decay over n in {1e3, 1e4, 1e5} with shared shrunk constants.
  {
    nf::lf::SpaceParams p = params;
    double vt = pair.vartheta0, th = pair.theta0;
    std::vector<double> nchi2;
    for (std::size_t n : {std::size_t{1000}, std::size_t{10000}, std::size_t{100000}}) {
      p.n = n;
      const auto pr = nf::lf::build_pair(kind, p, vt, th);
      vt = std::min(vt, pr.vartheta0);
      th = std::min(th, pr.theta0);
      const auto chi = nf::lf::chi2_distance(pr);
      nchi2.push_back(static_cast<double>(n) * chi.value);
      j["chi2"][std::to_string(n)] = {{"value", chi.value},
                                      {"tail_bound", chi.tail_bound},
                                      {"n_chi2", static_cast<double>(n) * chi.value}};
    }
    const bool decay = nchi2[0] > nchi2[1] && nchi2[1] > nchi2[2];
    check("n_chi2_decreasing", nchi2[2], nchi2[0], decay);
    const auto chi = nf::lf::chi2_distance(pair);
    check("n_chi2_below_half", static_cast<double>(params.n) * chi.value, 0.5,
          static_cast<double>(params.n) * chi.value < 0.5);
  }

  j["all_pass"] = all_pass;
  write_text(output, j.dump(2) + "\n");

  if (!dump_csv.empty()) {
    std::ostringstream csv;
    csv << "u,w1,w2,h1,h2,f1,f2\n";
    for (std::size_t i = 0; i < pair.u.size(); ++i) {
      csv << nf::format_double(pair.u[i]) << ',' << nf::format_double(pair.w_a[i]) << ','
          << nf::format_double(pair.w_b[i]) << ',' << nf::format_double(pair.h_a[i])
          << ',' << nf::format_double(pair.h_b[i]) << ','
          << nf::format_double(pair.f_a[i]) << ',' << nf::format_double(pair.f_b[i])
          << "\n";
    }
    write_text(dump_csv, csv.str());
  }
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fourier-domain empirical-null and nonnull-proportion estimation"};
  app.require_subcommand(1);

  // estimate
  auto* est = app.add_subcommand("estimate", "estimate null parameters and proportion from a z-score CSV");
  std::string est_input, est_null_mode = "estimate", est_output;
  double est_gamma = nf::kDefaultGamma, est_u0 = 0.0, est_sigma0 = 1.0;
  est->add_option("--input", est_input, "CSV with one numeric column (optional header 'z')")->required();
  est->add_option("--gamma", est_gamma, "threshold exponent in (0, 1/2)");
  est->add_option("--null-mode", est_null_mode, "estimate | known")
      ->check(CLI::IsMember({"estimate", "known"}));
  est->add_option("--u0", est_u0, "known null mean");
  est->add_option("--sigma0", est_sigma0, "known null standard deviation");
  est->add_option("--output,-o", est_output, "output JSON path ('-' = stdout)");

  // simulate
  auto* sim = app.add_subcommand("simulate", "run one simulation setting");
  std::string sim_setting = "1", sim_config, sim_output;
  double sim_scale = 1.0, sim_gamma = nf::kDefaultGamma;
  std::uint64_t sim_seed = 20100138;
  int sim_workers = 0;
  sim->add_option("--setting", sim_setting, "1|2|3a|3b|4a|4b|4c|5a|5b|5c");
  sim->add_option("--config", sim_config, "JSON config file (overrides other flags)");
  sim->add_option("--scale", sim_scale, "replication scale in (0, 1]")
      ->check(CLI::Range(1e-3, 1.0));
  sim->add_option("--seed", sim_seed, "master seed");
  sim->add_option("--gamma", sim_gamma, "tuning parameter gamma");
  sim->add_option("--workers", sim_workers, "worker threads (0 = auto)");
  sim->add_option("--output,-o", sim_output, "output CSV path");

  // reproduce
  auto* rep = app.add_subcommand("reproduce", "reproduce a published table or figure");
  std::string rep_target, rep_output;
  double rep_scale = 1.0;
  std::uint64_t rep_seed = 20100138;
  int rep_workers = 0;
  rep->add_option("--target", rep_target,
                  "table1|table2|table3|table4a|table4b|table4c|table5|fig2|fig3")
      ->required();
  rep->add_option("--scale", rep_scale, "replication scale in (0, 1]")
      ->check(CLI::Range(1e-3, 1.0));
  rep->add_option("--seed", rep_seed, "master seed");
  rep->add_option("--workers", rep_workers, "worker threads (0 = auto)");
  rep->add_option("--output,-o", rep_output, "output CSV path");

  // lowerbound
  auto* lb = app.add_subcommand("lowerbound", "build and verify a least-favorable pair");
  std::string lb_kind = "variance", lb_output, lb_dump;
  nf::lf::SpaceParams lb_params;
  double lb_tol = 1e-8;
  lb->add_option("--kind", lb_kind, "variance | mean | proportion");
  lb->add_option("--alpha", lb_params.alpha, "smoothness exponent (> 2)");
  lb->add_option("--beta", lb_params.beta, "sparsity exponent in [0, 1/2)");
  lb->add_option("--eps0", lb_params.eps0, "proportion bound scale in (0, 1)");
  lb->add_option("--q", lb_params.q, "moment order");
  lb->add_option("--a", lb_params.a, "null scale lower bound");
  lb->add_option("--A", lb_params.A, "moment bound");
  lb->add_option("--n", lb_params.n, "sample-size calibration");
  lb->add_option("--match-tol", lb_tol, "low-frequency match tolerance");
  lb->add_option("--output,-o", lb_output, "report JSON path ('-' = stdout)");
  lb->add_option("--dump-csv", lb_dump, "optional CSV dump of tabulated w/h/f");

  CLI11_PARSE(app, argc, argv);

  try {
    if (est->parsed()) {
      return cmd_estimate(est_input, est_gamma, est_null_mode, est_u0, est_sigma0,
                          est_output);
    }
    if (sim->parsed()) {
      return cmd_simulate(sim_config, sim_setting, sim_scale, sim_seed, sim_workers,
                          sim_gamma, sim_output);
    }
    if (rep->parsed()) {
      return cmd_reproduce(rep_target, rep_scale, rep_seed, rep_workers, rep_output);
    }
    if (lb->parsed()) {
      return cmd_lowerbound(lb_kind, lb_params, lb_tol, lb_output, lb_dump);
    }
  } catch (const nf::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
