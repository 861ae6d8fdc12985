#include "kovtop/theta.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "kovtop/errors.hpp"

namespace kovtop {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

Characteristic named_characteristic(std::string_view name) {
  if (name.substr(0, 5) == "theta") name.remove_prefix(5);
  if (name == "1") return {{1, 0}, {1, 1}};
  if (name == "2") return {{0, 1}, {0, 1}};
  if (name == "3") return {{1, 1}, {1, 0}};
  if (name == "14") return {{0, 0}, {0, 1}};
  if (name == "24") return {{1, 1}, {1, 1}};
  if (name == "34") return {{0, 1}, {0, 0}};
  if (name == "0") return {{0, 0}, {0, 0}};
  throw ConfigError("unknown theta characteristic '" + std::string(name) + "'");
}

PeriodMatrix::PeriodMatrix(const Eigen::Matrix2cd& tau) : tau_(tau) {
  if (!tau.allFinite()) throw ConfigError("period matrix is not finite");
  if (std::abs(tau(0, 1) - tau(1, 0)) > 1e-14 * (1 + tau.cwiseAbs().maxCoeff()))
    throw ConfigError("period matrix is not symmetric");
  const Eigen::Matrix2d im = tau.imag();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(0.5 * (im + im.transpose()));
  lambda_min_ = es.eigenvalues()(0);
  if (!(lambda_min_ > 0))
    throw ConfigError("Im(tau) is not positive definite");
}

double theta_tail_bound(const PeriodMatrix& tau, const CVec2& u, int N) {
  // On the shell |n|_inf = r, |q|_2 >= r - 1/2 and |q|_2 <= sqrt 2 (r + 1/2)
  // with q = n + eps/2; the shell holds 8r points.
  const double lam = tau.min_imag_eigenvalue();
  const double iu = u.imag().norm();
  double total = 0;
  for (int r = N + 1; r < N + 10000; ++r) {
    const double lo = r - 0.5, hi = std::sqrt(2.0) * (r + 0.5);
    const double term =
        8.0 * r * std::exp(-kPi * lam * lo * lo + 2 * kPi * hi * iu);
    total += term;
    if (term < 1e-300 || (term < 1e-20 * total && lo * lam > 2 * iu)) break;
  }
  return total;
}

ThetaValue theta_eval(const Characteristic& ch, const CVec2& u,
                      const PeriodMatrix& pm, const ThetaConfig& cfg) {
  if (cfg.N < 1) throw ConfigError("theta truncation N must be >= 1");
  int N = cfg.N;
  double tail = theta_tail_bound(pm, u, N);
  while (tail > cfg.target) {
    if (!cfg.auto_raise || N >= cfg.max_N)
      throw NumericalFailure("theta: tail bound " + std::to_string(tail) +
                             " above target at N = " + std::to_string(N));
    ++N;
    tail = theta_tail_bound(pm, u, N);
  }
  const Eigen::Matrix2cd& tau = pm.tau();
  const Complex ipi(0.0, kPi);
  Complex sum{};
  for (int n1 = -N; n1 <= N; ++n1) {
    const double q1 = n1 + 0.5 * ch.eps[0];
    for (int n2 = -N; n2 <= N; ++n2) {
      const double q2 = n2 + 0.5 * ch.eps[1];
      const Complex quad =
          tau(0, 0) * q1 * q1 + 2.0 * tau(0, 1) * q1 * q2 + tau(1, 1) * q2 * q2;
      const Complex lin = q1 * (2.0 * u(0) + static_cast<double>(ch.delta[0])) +
                          q2 * (2.0 * u(1) + static_cast<double>(ch.delta[1]));
      sum += std::exp(ipi * (quad + lin));
    }
  }
  return {sum, tail, N};
}

WeberRatios weber_ratios(const CVec2& u, const PeriodMatrix& tau,
                         const CVec3& x0, const CVec3& y0,
                         const ThetaConfig& cfg) {
  static const char* const kNum[3] = {"theta14", "theta24", "theta34"};
  static const char* const kDen[3] = {"theta1", "theta2", "theta3"};
  WeberRatios w;
  w.theta0 = theta_eval(named_characteristic("theta0"), u, tau, cfg).value;
  if (std::abs(w.theta0) < kThetaDivisorTol)
    throw SingularSystem("theta0 vanishes at u (theta divisor)");
  for (int j = 0; j < 3; ++j) {
    w.x(j) = x0(j) *
             theta_eval(named_characteristic(kNum[j]), u, tau, cfg).value /
             w.theta0;
    w.y(j) = y0(j) *
             theta_eval(named_characteristic(kDen[j]), u, tau, cfg).value /
             w.theta0;
  }
  return w;
}

}  // namespace kovtop
