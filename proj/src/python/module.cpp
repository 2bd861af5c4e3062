#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nullfreq/baselines.hpp"
#include "nullfreq/ecf.hpp"
#include "nullfreq/io.hpp"
#include "nullfreq/least_favorable.hpp"
#include "nullfreq/multiple_testing.hpp"
#include "nullfreq/null_estimation.hpp"
#include "nullfreq/proportion.hpp"
#include "nullfreq/simulate.hpp"

namespace py = pybind11;
using namespace nullfreq;

namespace {

Sample make_sample(std::vector<double> values, std::optional<std::vector<bool>> truth) {
  Sample s;
  s.values = std::move(values);
  s.truth = std::move(truth);
  s.validate();
  return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Fourier-domain empirical-null estimation, proportion estimation and "
            "FDR procedures";
  m.attr("__version__") = kVersion;

  py::register_exception<Error>(m, "NullfreqError");

  py::class_<NullParams>(m, "NullParams")
      .def(py::init<double, double>(), py::arg("u0") = 0.0, py::arg("sigma0") = 1.0)
      .def_readwrite("u0", &NullParams::u0)
      .def_readwrite("sigma0", &NullParams::sigma0)
      .def("__repr__", [](const NullParams& p) {
        return "NullParams(u0=" + std::to_string(p.u0) +
               ", sigma0=" + std::to_string(p.sigma0) + ")";
      });

  py::class_<FrequencyThreshold>(m, "FrequencyThreshold")
      .def_readonly("t_hat", &FrequencyThreshold::t_hat)
      .def_readonly("gamma", &FrequencyThreshold::gamma)
      .def_readonly("modulus_at_t", &FrequencyThreshold::modulus_at_t);

  py::class_<ProportionEstimate>(m, "ProportionEstimate")
      .def_readonly("raw", &ProportionEstimate::raw)
      .def_readonly("clamped", &ProportionEstimate::clamped)
      .def_readonly("gamma", &ProportionEstimate::gamma)
      .def_readonly("t_used", &ProportionEstimate::t_used);

  py::class_<NullEstimate>(m, "NullEstimate")
      .def_readonly("params", &NullEstimate::params)
      .def_readonly("sigma0_sq", &NullEstimate::sigma0_sq)
      .def_readonly("threshold", &NullEstimate::threshold);

  py::class_<MixtureSpec>(m, "MixtureSpec")
      .def_static("gaussian", &MixtureSpec::gaussian, py::arg("eps"),
                  py::arg("null_params"), py::arg("mu1"), py::arg("mu2"),
                  py::arg("sigma"))
      .def_static("double_exp", &MixtureSpec::double_exp, py::arg("eps"),
                  py::arg("null_params"), py::arg("mu1"), py::arg("mu2"), py::arg("tau"))
      .def_static("setting1", &MixtureSpec::setting1)
      .def_readwrite("eps", &MixtureSpec::eps)
      .def_readwrite("scale", &MixtureSpec::scale);

  py::class_<UniformLaw>(m, "UniformLaw")
      .def(py::init<double, double>(), py::arg("lo"), py::arg("hi"))
      .def_readwrite("lo", &UniformLaw::lo)
      .def_readwrite("hi", &UniformLaw::hi);

  m.def(
      "ecf_eval",
      [](std::vector<double> x, double t) { return ecf_eval(make_sample(std::move(x), {}), t); },
      py::arg("values"), py::arg("t"), "Empirical characteristic function at t");
  m.def(
      "ecf_deriv",
      [](std::vector<double> x, double t) { return ecf_deriv(make_sample(std::move(x), {}), t); },
      py::arg("values"), py::arg("t"));
  m.def(
      "threshold_freq",
      [](std::vector<double> x, double gamma) {
        return threshold_freq(make_sample(std::move(x), {}), gamma);
      },
      py::arg("values"), py::arg("gamma") = kDefaultGamma);
  m.def("model_cf", &model_cf, py::arg("spec"), py::arg("t"));
  m.def("deterministic_threshold_freq", &deterministic_threshold_freq, py::arg("spec"),
        py::arg("n"), py::arg("gamma") = kDefaultGamma);

  m.def(
      "estimate_null",
      [](std::vector<double> x, double gamma) {
        return estimate_null_detail(make_sample(std::move(x), {}), gamma);
      },
      py::arg("values"), py::arg("gamma") = kDefaultGamma);
  m.def(
      "estimate_eps_known_null",
      [](std::vector<double> x, double gamma) {
        return estimate_eps_known_null(make_sample(std::move(x), {}), gamma);
      },
      py::arg("values"), py::arg("gamma") = kDefaultGamma);
  m.def(
      "estimate_eps_plugin",
      [](std::vector<double> x, double gamma) {
        return estimate_eps_plugin(make_sample(std::move(x), {}), gamma);
      },
      py::arg("values"), py::arg("gamma") = kDefaultGamma);
  m.def(
      "phase_function_estimator",
      [](std::vector<double> x, double gamma, const std::string& omega) {
        WeightDensity w;
        if (omega == "uniform") w = WeightDensity::uniform();
        else if (omega == "triangle") w = WeightDensity::triangle();
        else if (omega == "smooth") w = WeightDensity::smooth();
        else fail(errc::invalid_input, "omega must be uniform, triangle or smooth");
        return phase_function_estimator(make_sample(std::move(x), {}), gamma, w);
      },
      py::arg("values"), py::arg("gamma") = kDefaultGamma, py::arg("omega") = "uniform");

  m.def(
      "pvalues_from_null",
      [](std::vector<double> x, const NullParams& null_params) {
        return pvalues_from_null(make_sample(std::move(x), {}), null_params).values;
      },
      py::arg("values"), py::arg("null_params"));
  m.def(
      "storey_estimator",
      [](std::vector<double> p, double lambda) {
        return storey_estimator(PValueVector{std::move(p)}, lambda);
      },
      py::arg("pvalues"), py::arg("lambda_") = 0.5);
  m.def(
      "efron_estimator",
      [](std::vector<double> x) {
        const auto e = efron_estimator(make_sample(std::move(x), {}));
        return py::make_tuple(e.null_params, e.sigma0_sq, e.eps);
      },
      py::arg("values"));

  m.def(
      "bh_stepup",
      [](std::vector<double> p, double alpha) {
        const auto r = bh_stepup(PValueVector{std::move(p)}, alpha);
        return py::make_tuple(r.rejected, r.count);
      },
      py::arg("pvalues"), py::arg("alpha"));
  m.def(
      "adaptive_bh",
      [](std::vector<double> p, double alpha, double eps_clamped) {
        const auto r = adaptive_bh(PValueVector{std::move(p)}, alpha,
                                   make_proportion_estimate(eps_clamped, 0.0, 0.0));
        return py::make_tuple(r.rejected, r.count);
      },
      py::arg("pvalues"), py::arg("alpha"), py::arg("eps"));
  m.def(
      "lfdr_values",
      [](std::vector<double> x, double eps, const NullParams& null_params,
         const std::string& bandwidth_rule) {
        const auto sample = make_sample(std::move(x), {});
        const auto rule = bandwidth_rule == "loo_cv" ? BandwidthRule::loo_cv_default(sample)
                                                     : BandwidthRule::silverman();
        const auto f = kde(sample, rule);
        return lfdr_values(sample, make_proportion_estimate(eps, 0.0, 0.0), null_params, f);
      },
      py::arg("values"), py::arg("eps"), py::arg("null_params"),
      py::arg("bandwidth_rule") = "silverman");
  m.def(
      "adaptz_from_lfdr",
      [](std::vector<double> lfdr, double alpha) {
        const auto r = adaptz_from_lfdr(lfdr, alpha);
        return py::make_tuple(r.rejected, r.count);
      },
      py::arg("lfdr"), py::arg("alpha"));

  m.def(
      "gen_sample",
      [](const MixtureSpec& spec, std::size_t n, std::uint64_t seed) {
        const auto s = gen_sample(spec, n, seed);
        return py::make_tuple(s.values, *s.truth);
      },
      py::arg("spec"), py::arg("n"), py::arg("seed"));

  auto lfm = m.def_submodule("lowerbound", "least-favorable pair construction");
  py::class_<lf::SpaceParams>(lfm, "SpaceParams")
      .def(py::init<>())
      .def_readwrite("alpha", &lf::SpaceParams::alpha)
      .def_readwrite("beta", &lf::SpaceParams::beta)
      .def_readwrite("eps0", &lf::SpaceParams::eps0)
      .def_readwrite("q", &lf::SpaceParams::q)
      .def_readwrite("a", &lf::SpaceParams::a)
      .def_readwrite("A", &lf::SpaceParams::A)
      .def_readwrite("n", &lf::SpaceParams::n);
  lfm.def(
      "verify",
      [](const std::string& kind_name, const lf::SpaceParams& params) {
        lf::PairKind kind = lf::PairKind::variance;
        if (kind_name == "mean") kind = lf::PairKind::mean;
        else if (kind_name == "proportion") kind = lf::PairKind::proportion;
        else if (kind_name != "variance")
          fail(errc::invalid_input, "kind must be variance, mean or proportion");
        const auto pair = lf::build_pair(kind, params);
        const auto match = lf::verify_low_freq_match(pair);
        const auto tail = lf::verify_tail(pair);
        const auto chi = lf::chi2_distance(pair);
        py::dict d;
        d["delta_n"] = pair.delta_n;
        d["vartheta0"] = pair.vartheta0;
        d["min_h1"] = pair.min_h_a;
        d["min_h2"] = pair.min_h_b;
        d["mass_h1"] = pair.mass_h_a;
        d["mass_h2"] = pair.mass_h_b;
        d["low_freq_match_rel"] = match.max_rel;
        d["w1_tail_min"] = tail.wa_scaled_min;
        d["w1_tail_max"] = tail.wa_scaled_max;
        d["chi2"] = chi.value;
        return d;
      },
      py::arg("kind"), py::arg("params"));
}
