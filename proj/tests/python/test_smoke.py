"""Smoke tests for the python bindings (driven by ctest with PYTHONPATH set)."""

import math

import pytest

import nullfreq as nf


def make_null_sample(n=20000, seed=12345):
    values, truth = nf.gen_sample(
        nf.MixtureSpec.gaussian(0.0, nf.NullParams(0.0, 1.0),
                                nf.UniformLaw(-1.0, 0.0), nf.UniformLaw(0.0, 1.0), 1.0),
        n, seed)
    return values, truth


def test_version():
    assert nf.__version__


def test_ecf_basics():
    v = nf.ecf_eval([0.5, 1.5, -2.0], 0.0)
    assert v == pytest.approx(1.0)
    v1 = nf.ecf_eval([0.5, 1.5, -2.0], 1.0)
    assert v1.real == pytest.approx(0.17739097567031108, abs=1e-14)
    assert v1.imag == pytest.approx(0.18920769946085858, abs=1e-14)
    d = nf.ecf_deriv([1.0, -1.0], 0.0)
    assert abs(d) < 1e-15


def test_threshold_and_null_estimation():
    values, _ = make_null_sample()
    th = nf.threshold_freq(values, gamma=0.2)
    assert 1.5 < th.t_hat < 2.5
    est = nf.estimate_null(values, gamma=0.2)
    assert est.params.u0 == pytest.approx(0.0, abs=0.25)
    assert est.sigma0_sq == pytest.approx(1.0, abs=0.25)


def test_proportion_estimators():
    spec = nf.MixtureSpec.setting1()
    values, truth = nf.gen_sample(spec, 10000, 777)
    known = nf.estimate_eps_known_null(values, gamma=0.2)
    assert 0.0 <= known.clamped <= 1.0
    plug = nf.estimate_eps_plugin(values, gamma=0.2)
    assert plug.clamped == pytest.approx(0.2, abs=0.25)
    phase = nf.phase_function_estimator(values, gamma=0.2, omega="smooth")
    assert math.isfinite(phase.raw)


def test_testing_pipeline():
    spec = nf.MixtureSpec.setting1()
    values, truth = nf.gen_sample(spec, 5000, 31)
    pvals = nf.pvalues_from_null(values, nf.NullParams(0.0, 1.0))
    assert min(pvals) >= 0.0 and max(pvals) <= 1.0
    rejected, count = nf.bh_stepup(pvals, 0.1)
    assert count == sum(rejected)
    rej2, count2 = nf.adaptive_bh(pvals, 0.1, 0.2)
    assert count2 >= count
    storey = nf.storey_estimator(pvals)
    assert storey.clamped <= 1.0
    lfdr = nf.lfdr_values(values, 0.2, nf.NullParams(0.0, 1.0))
    assert all(0.0 <= v <= 1.0 for v in lfdr)
    _, k = nf.adaptz_from_lfdr(lfdr, 0.1)
    assert 0 <= k <= len(lfdr)


def test_model_cf():
    spec = nf.MixtureSpec.gaussian(0.0, nf.NullParams(0.0, 1.0),
                                   nf.UniformLaw(-1.0, 0.0), nf.UniformLaw(0.0, 1.0), 1.0)
    v = nf.model_cf(spec, 1.0)
    assert v.real == pytest.approx(math.exp(-0.5), abs=1e-12)
    t = nf.deterministic_threshold_freq(spec, 10000, gamma=0.2)
    assert t == pytest.approx(math.sqrt(0.4 * math.log(1e4)), abs=1e-6)


def test_error_mapping():
    with pytest.raises(nf.NullfreqError):
        nf.threshold_freq([], 0.2)
    with pytest.raises(nf.NullfreqError):
        nf.estimate_eps_known_null([1.0, 2.0], 0.9)


def test_lowerbound_verify():
    params = nf.lowerbound.SpaceParams()
    params.n = 1000
    out = nf.lowerbound.verify("variance", params)
    assert out["min_h1"] >= -1e-6
    assert abs(out["mass_h1"] - 1.0) <= 1e-6
    assert out["low_freq_match_rel"] <= 1e-8
    assert 0.8 <= out["w1_tail_min"] <= out["w1_tail_max"] <= 1.2
