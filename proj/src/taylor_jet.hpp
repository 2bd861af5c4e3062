#pragma once

#include <cmath>
#include <complex>
#include <vector>

namespace nullfreq::lf::detail {

/// Truncated Taylor series (jet) of runtime order; c[j] = f^(j)(t0)/j!.
/// Used to evaluate exact k-th derivatives of the smooth-cutoff frequency
/// functions for the integration-by-parts far-field transforms.
template <class S>
struct Jet {
  std::vector<S> c;

  explicit Jet(int order) : c(static_cast<std::size_t>(order) + 1, S(0)) {}

  int order() const { return static_cast<int>(c.size()) - 1; }

  static Jet constant(S v, int order) {
    Jet j(order);
    j.c[0] = v;
    return j;
  }
  static Jet variable(double t0, int order) {
    Jet j(order);
    j.c[0] = S(t0);
    if (order >= 1) j.c[1] = S(1);
    return j;
  }

  S derivative(int m) const {
    double f = 1.0;
    for (int i = 2; i <= m; ++i) f *= i;
    return c[static_cast<std::size_t>(m)] * S(f);
  }
};

template <class S>
Jet<S> operator+(const Jet<S>& a, const Jet<S>& b) {
  Jet<S> r(a.order());
  for (std::size_t i = 0; i < r.c.size(); ++i) r.c[i] = a.c[i] + b.c[i];
  return r;
}

template <class S>
Jet<S> operator-(const Jet<S>& a, const Jet<S>& b) {
  Jet<S> r(a.order());
  for (std::size_t i = 0; i < r.c.size(); ++i) r.c[i] = a.c[i] - b.c[i];
  return r;
}

template <class S>
Jet<S> operator*(const Jet<S>& a, const Jet<S>& b) {
  Jet<S> r(a.order());
  for (std::size_t i = 0; i < r.c.size(); ++i) {
    S acc(0);
    for (std::size_t j = 0; j <= i; ++j) acc += a.c[j] * b.c[i - j];
    r.c[i] = acc;
  }
  return r;
}

template <class S>
Jet<S> operator*(S s, const Jet<S>& a) {
  Jet<S> r(a.order());
  for (std::size_t i = 0; i < r.c.size(); ++i) r.c[i] = s * a.c[i];
  return r;
}

template <class S>
Jet<S> recip(const Jet<S>& a) {
  Jet<S> r(a.order());
  r.c[0] = S(1) / a.c[0];
  for (std::size_t i = 1; i < r.c.size(); ++i) {
    S acc(0);
    for (std::size_t j = 1; j <= i; ++j) acc += a.c[j] * r.c[i - j];
    r.c[i] = -acc / a.c[0];
  }
  return r;
}

template <class S>
Jet<S> exp(const Jet<S>& a) {
  Jet<S> r(a.order());
  using std::exp;
  r.c[0] = exp(a.c[0]);
  for (std::size_t i = 1; i < r.c.size(); ++i) {
    S acc(0);
    for (std::size_t j = 1; j <= i; ++j) {
      acc += S(static_cast<double>(j)) * a.c[j] * r.c[i - j];
    }
    r.c[i] = acc / S(static_cast<double>(i));
  }
  return r;
}

/// sin and cos computed jointly through their coupled recurrences.
template <class S>
void sincos_jet(const Jet<S>& a, Jet<S>& s, Jet<S>& c) {
  using std::cos;
  using std::sin;
  s = Jet<S>(a.order());
  c = Jet<S>(a.order());
  s.c[0] = sin(a.c[0]);
  c.c[0] = cos(a.c[0]);
  for (std::size_t i = 1; i < s.c.size(); ++i) {
    S as(0), ac(0);
    for (std::size_t j = 1; j <= i; ++j) {
      as += S(static_cast<double>(j)) * a.c[j] * c.c[i - j];
      ac += S(static_cast<double>(j)) * a.c[j] * s.c[i - j];
    }
    s.c[i] = as / S(static_cast<double>(i));
    c.c[i] = -ac / S(static_cast<double>(i));
  }
}

/// a^p for real p, requiring Re(a0) > 0 on the principal branch.
template <class S>
Jet<S> pow(const Jet<S>& a, double p) {
  using std::pow;
  Jet<S> r(a.order());
  r.c[0] = pow(a.c[0], S(p));
  // (a^p)' = p a^{p-1} a'  =>  standard recurrence via a * r' = p * a' * r.
  for (std::size_t i = 1; i < r.c.size(); ++i) {
    S acc(0);
    for (std::size_t j = 1; j <= i; ++j) {
      const double jj = static_cast<double>(j);
      const double ii = static_cast<double>(i);
      acc += ((p + 1.0) * jj / ii - 1.0) * a.c[j] * r.c[i - j];
    }
    r.c[i] = acc / a.c[0];
  }
  return r;
}

}  // namespace nullfreq::lf::detail
