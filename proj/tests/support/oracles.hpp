#pragma once

// Independent reference computations for the unit tests. Nothing here calls
// into the code paths it is used to check.

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>

#include "kovtop/e3_state.hpp"

namespace kovtop::oracle {

// Integrals evaluated term by term from the complex variables
// xi_+- = m_+-^2 + n_+-, m_+- = m1 +- i m2, n_+- = n1 +- i n2.
inline IntegralSet integrals(const EuclideanState& s) {
  const double m1 = s.m(0), m2 = s.m(1), m3 = s.m(2);
  const double n1 = s.n(0), n2 = s.n(1), n3 = s.n(2);
  const Complex mp(m1, m2), np(n1, n2);
  const Complex xi_p = mp * mp + np;
  IntegralSet in;
  in.h1 = m1 * m1 + m2 * m2 + 2 * m3 * m3 - n1;
  in.k2 = std::norm(xi_p);
  in.c3 = m1 * n1 + m2 * n2 + m3 * n3;
  in.c4 = n1 * n1 + n2 * n2 + n3 * n3;
  in.h2 = in.h1 * in.h1 - in.k2;
  in.gamma4 = in.c4 - in.k2;
  return in;
}

inline double component(const EuclideanState& s, int k) {
  return k < 3 ? s.m(k) : s.n(k - 3);
}

inline EuclideanState shifted(EuclideanState s, int k, double h) {
  if (k < 3)
    s.m(k) += h;
  else
    s.n(k - 3) += h;
  return s;
}

// Fourth-order central difference of a scalar function of the state.
inline std::array<Complex, 6> fd_gradient(
    const std::function<Complex(const EuclideanState&)>& f,
    const EuclideanState& s, double rel_step = 1e-5) {
  std::array<Complex, 6> g{};
  for (int k = 0; k < 6; ++k) {
    const double h = rel_step * std::max(1.0, std::abs(component(s, k)));
    g[k] = (-f(shifted(s, k, 2 * h)) + 8.0 * f(shifted(s, k, h)) -
            8.0 * f(shifted(s, k, -h)) + f(shifted(s, k, -2 * h))) /
           (12 * h);
  }
  return g;
}

// Lie-Poisson bracket as an explicit sum over the Levi-Civita symbol.
inline Complex bracket(const std::array<Complex, 6>& a,
                       const std::array<Complex, 6>& b,
                       const EuclideanState& s) {
  auto eps = [](int i, int j, int k) {
    return static_cast<double>((i - j) * (j - k) * (k - i)) / 2.0;
  };
  Complex acc = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        const double e = eps(i, j, k);
        if (e == 0) continue;
        acc += e * (s.m(k) * a[i] * b[j] +
                    s.n(k) * (a[i] * b[3 + j] + a[3 + i] * b[j]));
      }
  return acc;
}

// Genus-1 theta series with characteristic [e; d].
inline Complex theta1d(int e, int d, Complex z, Complex t, int N = 40) {
  Complex acc = 0;
  for (int n = -N; n <= N; ++n) {
    const double k = n + 0.5 * e;
    acc += std::exp(Complex(0, std::numbers::pi) *
                    (k * k * t + k * (2.0 * z + static_cast<double>(d))));
  }
  return acc;
}

}  // namespace kovtop::oracle
