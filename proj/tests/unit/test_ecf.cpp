#include <doctest.h>

#include <cmath>
#include <complex>

#include "nullfreq/ecf.hpp"
#include "nullfreq/rng.hpp"

using namespace nullfreq;

namespace {

Sample make(std::vector<double> v) {
  Sample s;
  s.values = std::move(v);
  return s;
}

Sample standard_normal_sample(std::size_t n, std::uint64_t seed) {
  RngStream rng(seed);
  Sample s;
  s.values.resize(n);
  for (double& v : s.values) v = rng.normal();
  return s;
}

}  // namespace

TEST_CASE("ecf at t = 0 is exactly 1") {
  const auto s = make({0.3, -1.2, 5.0, 2.2});
  const auto v = ecf_eval(s, 0.0);
  CHECK(v.real() == 1.0);
  CHECK(v.imag() == 0.0);
}

TEST_CASE("ecf of a symmetric pair vanishes at pi/2") {
  const auto v = ecf_eval(make({1.0, -1.0}), M_PI / 2.0);
  CHECK(std::abs(v.real()) < 1e-15);
  CHECK(std::abs(v.imag()) < 1e-15);
}

TEST_CASE("ecf and derivative match the term-by-term oracle") {
  // frozen from a 40-digit mpmath evaluation of (1/3) sum exp(i t x_j)
  const auto s = make({0.5, 1.5, -2.0});
  const auto v = ecf_eval(s, 1.0);
  CHECK(v.real() == doctest::Approx(0.17739097567031107974).epsilon(1e-14));
  CHECK(v.imag() == doctest::Approx(0.18920769946085857861).epsilon(1e-14));
  const auto d = ecf_deriv(s, 1.0);
  CHECK(d.real() == doctest::Approx(-1.1848500342865155124).epsilon(1e-14));
  CHECK(d.imag() == doctest::Approx(0.45906358551367516573).epsilon(1e-14));
}

TEST_CASE("ecf_deriv trivial cases") {
  const auto single = make({3.7});
  const auto d0 = ecf_deriv(single, 0.0);
  CHECK(d0.real() == doctest::Approx(0.0));
  CHECK(d0.imag() == doctest::Approx(3.7));
  const auto sym = ecf_deriv(make({2.5, -2.5}), 0.0);
  CHECK(std::abs(sym.real()) < 1e-16);
  CHECK(std::abs(sym.imag()) < 1e-16);
}

TEST_CASE("ecf basic properties on random samples") {
  const auto s = standard_normal_sample(500, 7);
  RngStream rng(11);
  for (int i = 0; i < 12; ++i) {
    const double t = rng.uniform(-4.0, 4.0);
    const auto v = ecf_eval(s, t);
    CHECK(std::abs(v) <= 1.0 + 1e-12);
    const auto vc = ecf_eval(s, -t);
    CHECK(vc.real() == doctest::Approx(v.real()).epsilon(1e-13));
    CHECK(vc.imag() == doctest::Approx(-v.imag()).epsilon(1e-13));
    // derivative vs centered differences
    const double h = 1e-5;
    const auto num = (ecf_eval(s, t + h) - ecf_eval(s, t - h)) / (2.0 * h);
    const auto d = ecf_deriv(s, t);
    CHECK(std::abs(d - num) < 1e-7);
  }
}

TEST_CASE("ecf input validation") {
  CHECK_THROWS_AS(ecf_eval(make({}), 1.0), Error);
  CHECK_THROWS_AS(ecf_eval(make({1.0}), std::nan("")), Error);
  CHECK_THROWS_AS(ecf_eval(make({1.0, std::numeric_limits<double>::infinity()}), 1.0),
                  Error);
}

TEST_CASE("model_cf closed forms") {
  // pure null N(0,1)
  auto spec = MixtureSpec::gaussian(0.0, {0.0, 1.0}, {-1.0, 0.0}, {0.0, 1.0}, 1.0);
  for (double t : {0.3, 1.0, 2.5}) {
    const auto v = model_cf(spec, t);
    CHECK(v.real() == doctest::Approx(std::exp(-0.5 * t * t)).epsilon(1e-14));
    CHECK(v.imag() == doctest::Approx(0.0));
  }
  // eps = 1, point-mass-like location at mu via a degenerate-width uniform
  auto point = MixtureSpec::gaussian(1.0, {0.0, 1.0}, {2.0 - 1e-12, 2.0 + 1e-12},
                                     {2.0 - 1e-12, 2.0 + 1e-12}, 1.0);
  const double t = 1.3;
  const auto v = model_cf(point, t);
  const auto expect = std::exp(std::complex<double>(0.0, 2.0 * t)) *
                      std::exp(-0.5 * t * t);
  CHECK(std::abs(v - expect) < 1e-10);
}

TEST_CASE("model_cf matches a large Monte-Carlo ECF") {
  const auto spec = MixtureSpec::setting1();
  RngStream rng(123);
  const std::size_t n = 1000000;
  Sample s;
  s.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rng.bernoulli(spec.eps)) {
      const auto& law = rng.bernoulli(0.5) ? spec.mu1 : spec.mu2;
      s.values[i] = rng.uniform(law.lo, law.hi) + spec.scale * rng.normal();
    } else {
      s.values[i] = rng.normal();
    }
  }
  const double t = 1.0;
  const auto mc = ecf_eval(s, t);
  const auto an = model_cf(spec, t);
  // |ecf - cf| has SD ~ 1/sqrt(n) per component
  const double se = 3.0 / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(mc.real() - an.real()) < se);
  CHECK(std::abs(mc.imag() - an.imag()) < se);
}

TEST_CASE("model_cf derivative is the analytic derivative") {
  const auto spec = MixtureSpec::setting1();
  const auto handle = make_model_handle(spec);
  for (double t : {0.0, 0.4, 1.7, 3.0}) {
    const double h = 1e-6;
    const auto num = (handle.value(t + h) - handle.value(t - h)) / (2.0 * h);
    CHECK(std::abs(handle.deriv(t) - num) < 1e-8);
  }
  const auto de = MixtureSpec::double_exp(0.3, {0.1, 1.1}, {-0.9, -0.1}, {0.5, 1.5}, 1.2);
  const auto hde = make_model_handle(de);
  for (double t : {0.2, 1.1, 2.6}) {
    const double h = 1e-6;
    const auto num = (hde.value(t + h) - hde.value(t - h)) / (2.0 * h);
    CHECK(std::abs(hde.deriv(t) - num) < 1e-8);
  }
}

TEST_CASE("deterministic threshold closed forms") {
  auto null01 = MixtureSpec::gaussian(0.0, {0.0, 1.0}, {-1.0, 0.0}, {0.0, 1.0}, 1.0);
  const double expect = std::sqrt(0.4 * std::log(1e4));
  CHECK(deterministic_threshold_freq(null01, 10000, 0.2) ==
        doctest::Approx(expect).epsilon(1e-9));

  auto null02 = MixtureSpec::gaussian(0.0, {0.0, 2.0}, {-1.0, 0.0}, {0.0, 1.0}, 1.0);
  CHECK(deterministic_threshold_freq(null02, 10000, 0.2) ==
        doctest::Approx(0.5 * expect).epsilon(1e-9));

  // strictly increasing in n and gamma for the pure-null analytic CF
  double prev = 0.0;
  for (std::size_t n : {1000, 10000, 100000}) {
    const double t = deterministic_threshold_freq(null01, n, 0.2);
    CHECK(t > prev);
    prev = t;
  }
  prev = 0.0;
  for (double g : {0.1, 0.2, 0.3, 0.4}) {
    const double t = deterministic_threshold_freq(null01, 10000, g);
    CHECK(t > prev);
    prev = t;
  }

  // Setting 1 value against a dense-grid oracle scan (1e-5 step)
  const auto spec = MixtureSpec::setting1();
  const double got = deterministic_threshold_freq(spec, 10000, 0.2);
  const double level = std::pow(1e4, -0.2);
  double oracle = 0.0;
  for (double t = 1e-5; t < 10.0; t += 1e-5) {
    if (std::abs(model_cf(spec, t)) <= level) {
      oracle = t;
      break;
    }
  }
  CHECK(got == doctest::Approx(oracle).epsilon(2e-5));
}

TEST_CASE("empirical threshold on seeded N(0,1) data") {
  const auto s = standard_normal_sample(10000, 20100138);
  const auto th = threshold_freq(s, 0.2);
  // near sqrt(2 * 0.2 * log n) ~ 1.92 up to sampling fluctuation
  CHECK(th.t_hat > 1.6);
  CHECK(th.t_hat < 2.3);
  const double level = std::pow(1e4, -0.2);
  CHECK(std::abs(ecf_eval(s, th.t_hat)) == doctest::Approx(level).epsilon(1e-6));
  CHECK(th.modulus_at_t <= level + 1e-8);

  // dense-grid oracle on the same data: first 1e-4-step grid point below the
  // level, refined; must agree to 1e-6
  double bracket_lo = 0.0, bracket_hi = 0.0;
  for (double t = 1e-4; t < 5.0; t += 1e-4) {
    if (std::abs(ecf_eval(s, t)) <= level) {
      bracket_lo = t - 1e-4;
      bracket_hi = t;
      break;
    }
  }
  REQUIRE(bracket_hi > 0.0);
  while (bracket_hi - bracket_lo > 1e-10) {
    const double mid = 0.5 * (bracket_lo + bracket_hi);
    if (std::abs(ecf_eval(s, mid)) <= level) {
      bracket_hi = mid;
    } else {
      bracket_lo = mid;
    }
  }
  CHECK(th.t_hat == doctest::Approx(0.5 * (bracket_lo + bracket_hi)).epsilon(1e-6));

  // every scan grid point below t_hat stays above the level
  for (double t = 0.01; t < th.t_hat - 0.005; t += 0.01) {
    CHECK(std::abs(ecf_eval(s, t)) > level);
  }
}

TEST_CASE("threshold is invariant under permutation") {
  auto s = standard_normal_sample(2000, 99);
  const double t1 = threshold_freq(s, 0.2).t_hat;
  std::reverse(s.values.begin(), s.values.end());
  std::swap(s.values[17], s.values[1200]);
  const double t2 = threshold_freq(s, 0.2).t_hat;
  CHECK(t1 == doctest::Approx(t2).epsilon(1e-12));
}

TEST_CASE("threshold not found on degenerate data") {
  Sample s;
  s.values.assign(100, 0.0);  // |ecf| = 1 everywhere
  CHECK_THROWS_AS(threshold_freq(s, 0.2), Error);
  CHECK_THROWS_AS(threshold_freq(standard_normal_sample(100, 1), 0.9), Error);
}
