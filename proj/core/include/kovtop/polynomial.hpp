#pragma once

// Dense univariate polynomials with ascending coefficients, c[k] * s^k.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include <Eigen/Eigenvalues>

#include "kovtop/errors.hpp"

namespace kovtop {

template <class T>
class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(std::initializer_list<T> c) : c_(c) {}
  explicit Polynomial(std::vector<T> c) : c_(std::move(c)) {}

  const std::vector<T>& coeffs() const { return c_; }
  std::size_t size() const { return c_.size(); }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  T operator[](std::size_t k) const { return k < c_.size() ? c_[k] : T{}; }

  template <class S>
  auto operator()(const S& s) const {
    using R = decltype(T{} * s);
    R acc{};
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * s + *it;
    return acc;
  }

  Polynomial derivative() const {
    if (c_.size() <= 1) return Polynomial({T{}});
    std::vector<T> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k)
      d[k - 1] = static_cast<double>(k) * c_[k];
    return Polynomial(std::move(d));
  }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.c_.empty() || b.c_.empty()) return {};
    std::vector<T> r(a.c_.size() + b.c_.size() - 1, T{});
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
    return Polynomial(std::move(r));
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<T> r(std::max(a.size(), b.size()), T{});
    for (std::size_t k = 0; k < r.size(); ++k) r[k] = a[k] + b[k];
    return Polynomial(std::move(r));
  }

  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) {
    std::vector<T> r(std::max(a.size(), b.size()), T{});
    for (std::size_t k = 0; k < r.size(); ++k) r[k] = a[k] - b[k];
    return Polynomial(std::move(r));
  }

  friend Polynomial operator*(double s, const Polynomial& a) {
    std::vector<T> r = a.c_;
    for (auto& x : r) x *= s;
    return Polynomial(std::move(r));
  }

  // Largest coefficient magnitude; the natural scale for residuals.
  double max_abs() const {
    double m = 0;
    for (const auto& x : c_) m = std::max(m, static_cast<double>(std::abs(x)));
    return m;
  }

 private:
  std::vector<T> c_;
};

using RealPoly = Polynomial<double>;
using ComplexPoly = Polynomial<std::complex<double>>;

// Lexicographic order on (real, imag).
inline bool lex_less(const std::complex<double>& a,
                     const std::complex<double>& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

// Roots of a real polynomial as eigenvalues of its companion matrix, each
// refined by one Newton step and sorted lexicographically.
inline std::vector<std::complex<double>> polynomial_roots(const RealPoly& p) {
  const int n = p.degree();
  if (n < 1) throw NumericalFailure("polynomial_roots: degree < 1");
  const double lead = p[static_cast<std::size_t>(n)];
  if (lead == 0.0) throw NumericalFailure("polynomial_roots: zero leading term");
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i)
    companion(i, n - 1) = -p[static_cast<std::size_t>(i)] / lead;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  if (solver.info() != Eigen::Success)
    throw NumericalFailure("polynomial_roots: eigenvalue solver failed");
  const RealPoly dp = p.derivative();
  std::vector<std::complex<double>> roots;
  roots.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::complex<double> z = solver.eigenvalues()(i);
    const std::complex<double> d = dp(z);
    if (std::abs(d) > 0) {
      const std::complex<double> step = p(z) / d;
      if (std::isfinite(std::abs(step))) z -= step;
    }
    // Conjugate pairs of a real polynomial stay exact conjugates.
    if (std::abs(z.imag()) <= 1e-14 * std::max(1.0, std::abs(z)))
      z = std::complex<double>(z.real(), 0.0);
    roots.push_back(z);
  }
  std::sort(roots.begin(), roots.end(), lex_less);
  return roots;
}

}  // namespace kovtop
