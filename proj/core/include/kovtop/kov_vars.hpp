#pragma once

// The Kovalevskaya chart (f, g), the quadratic forms S1, S2, T1, T2, the
// separation variables s1, s2 and the Poisson-commutativity relations between
// them.
//
// Notes on conventions fixed by numerical checks:
//  * In the g2 equation of motion the coefficient of f1^2/2 is
//    gamma4 = c4 - k^2 (determined by matching the pushforward of the
//    equations of motion through the chart).
//  * As phase-space functions, S1, S2, T1, T2 carry h1 = H1(x) and
//    h2 = H1(x)^2 - H~2(x); only then do their brackets vanish. As values on a
//    trajectory the constants of that trajectory are used instead; the two
//    readings agree on the level set.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "kovtop/e3_state.hpp"
#include "kovtop/rigid_dynamics.hpp"

namespace kovtop {

inline constexpr double kChartThreshold = 1e-8;
// Roots closer than this (relative to 1 + |s1|) count as coincident.
inline constexpr double kRootCollisionTol = 1e-6;

struct FgCoords {
  Vec3 f = Vec3::Zero();
  Vec3 g = Vec3::Zero();

  double unit_residual() const;        // f1 f3 - f2^2 - 1
  double orthogonality_residual() const;  // f1 g3 + 2 f2 g2 + f3 g1
};

// Throws ChartSingularity when |m2| < threshold.
FgCoords to_fg(const EuclideanState& state, double threshold = kChartThreshold);

// Solves the two linear equations for (n1, n2) given m, n3 and the constants.
// Throws SingularSystem when m2 (m1^2 + m2^2) vanishes.
std::pair<double, double> reconstruct_n12(const Vec3& m, double n3,
                                          const IntegralSet& integ);

struct SpectralVars {
  double S1 = 0, S2 = 0, T1 = 0, T2 = 0;
  Complex s1{}, s2{};  // roots of s^2 - S1 s + S2; Re s1 >= Re s2
  double nu = 0;        // h1 - S1
  double discriminant = 0;  // S1^2 - 4 S2
  bool double_root = false;
  double h1 = 0, h2 = 0;

  double S1_lambda(double lambda) const { return S1 + 2 * lambda * h1; }
  double S2_lambda(double lambda) const { return S2 + lambda * h2; }
  // F(s) = s^2 - S1 s + S2
  Complex F(Complex s) const { return s * s - S1 * s + S2; }
};

SpectralVars s_forms(const FgCoords& fg, const IntegralSet& integ);

// Orders a root pair: larger real part first, ties by larger imaginary part.
std::pair<Complex, Complex> order_roots(Complex a, Complex b);

struct FgRates {
  Vec3 df = Vec3::Zero();
  Vec3 dg = Vec3::Zero();
  double df2_alt = 0;  // alternative form of f2', (-f1 g3 + f3 g1)/4
};

FgRates fg_eom(const FgCoords& fg, const IntegralSet& integ);

// Right-hand sides of the second-order equations for f with nu = h1 - S1.
Vec3 fg_second_derivative(const FgCoords& fg, const IntegralSet& integ);

// Stencil f'' minus the second-order equations at grid time t, using the
// trajectory's reference constants.
Vec3 second_derivative_residual(const Trajectory& traj, double t);

// min |m2| over the stencil window centred at i; the chart conditioning of
// every finite-difference check built on f and g.
double window_min_abs_m2(const Trajectory& traj, std::size_t i);

struct CommutativityReport {
  bool coincident_roots = false;  // {s1, s2} skipped when set
  Complex s1_s2{};
  Complex S1_S2{};
  Complex T1_T2{};
  Complex h_mixed{};  // 2{H1, S2} - {H2, S1}
  std::vector<std::pair<double, Complex>> lambda;  // {S1(l), S2(l)}
};

inline constexpr double kDefaultLambdas[] = {0.0, 1.0, -1.0, 5.0};

CommutativityReport commutativity_report(
    const EuclideanState& state,
    std::span<const double> lambdas = kDefaultLambdas);

namespace observables {

Observable S1();
Observable S2();
Observable T1();
Observable T2();
// Throw RootCollision where s1 = s2 (gradient by implicit differentiation
// divides by 2s - S1).
Observable s1();
Observable s2();
Observable S1_lambda(double lambda);  // S1 + 2 lambda H1
Observable S2_lambda(double lambda);  // S2 + lambda H2

}  // namespace observables

}  // namespace kovtop
