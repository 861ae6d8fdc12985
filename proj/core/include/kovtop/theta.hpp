#pragma once

// Genus-2 theta functions with half-integer characteristics,
//   theta[eps; delta](u) = sum_n exp(i pi [(n + eps/2)^T tau (n + eps/2)
//                                        + (n + eps/2)^T (2 u + delta)]),
// summed over n in [-N, N]^2, and the Weber-style ratios built from them.

#include <array>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "kovtop/e3_state.hpp"

namespace kovtop {

using CVec2 = Eigen::Vector2cd;

struct Characteristic {
  std::array<int, 2> eps{};
  std::array<int, 2> delta{};

  int parity() const { return (eps[0] * delta[0] + eps[1] * delta[1]) % 2; }
  bool odd() const { return parity() == 1; }
  bool operator==(const Characteristic&) const = default;
};

// Names: "theta0", "theta1", "theta2", "theta3", "theta14", "theta24",
// "theta34" (also accepted without the "theta" prefix). Throws ConfigError.
Characteristic named_characteristic(std::string_view name);

inline constexpr std::array<std::string_view, 7> kCharacteristicNames = {
    "theta1", "theta2", "theta3", "theta14", "theta24", "theta34", "theta0"};

class PeriodMatrix {
 public:
  // Throws ConfigError unless tau is symmetric with Im(tau) positive definite.
  explicit PeriodMatrix(const Eigen::Matrix2cd& tau);

  const Eigen::Matrix2cd& tau() const { return tau_; }
  double min_imag_eigenvalue() const { return lambda_min_; }

 private:
  Eigen::Matrix2cd tau_;
  double lambda_min_ = 0;
};

struct ThetaConfig {
  int N = 8;
  double target = 1e-12;  // absolute bound on the neglected tail
  // Raise N until the tail bound meets the target instead of failing.
  bool auto_raise = true;
  int max_N = 64;
};

struct ThetaValue {
  Complex value{};
  double tail_bound = 0;
  int N = 0;  // truncation actually used
};

// Bound on the sum of |summand| over |n|_inf > N, from the Gaussian decay
// governed by the smallest eigenvalue of Im(tau).
double theta_tail_bound(const PeriodMatrix& tau, const CVec2& u, int N);

// Throws NumericalFailure when the target is unreachable (auto_raise off, or
// max_N exceeded).
ThetaValue theta_eval(const Characteristic& ch, const CVec2& u,
                      const PeriodMatrix& tau, const ThetaConfig& cfg = {});

struct WeberRatios {
  CVec3 x = CVec3::Zero();
  CVec3 y = CVec3::Zero();
  Complex theta0{};
};

inline constexpr double kThetaDivisorTol = 1e-12;

// x_j = x0_j theta_j4(u) / theta0(u), y_j = y0_j theta_j(u) / theta0(u).
// Throws SingularSystem when |theta0(u)| < kThetaDivisorTol.
WeberRatios weber_ratios(const CVec2& u, const PeriodMatrix& tau,
                         const CVec3& x0, const CVec3& y0,
                         const ThetaConfig& cfg = {});

}  // namespace kovtop
