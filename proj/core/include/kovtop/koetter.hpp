#pragma once

// The Koetter identity, the polynomials P2, P3, P5, Q1, Q2, the roots a_j of
// P3, and the transform from the chart (f, g) to the Weierstrass variables
// (x, y).
//
// Branches. sqrt(2 a_j) and sqrt(P3'(a_j)) are principal values fixed once per
// level set (the roots do not move along a trajectory). x_j is defined through
// Q2(a_j) = i sqrt(2 a_j) x_j, which needs no further branch choice. The
// inverse is the Lagrange interpolation of Q2 through the nodes a_j.
//
// The y variable from the difference quotient uses sqrt(P5(s_i)) taken from
// the dynamics, sqrt(2 P5(s_1)) = -i (s1 - s2) s1'. It coincides with
// (eta / sqrt 2) Y_j, where Y_j = R(a_j) / (i sqrt(2 a_j)),
// R(s) = g1 s^2 - (g3 + h1 g1) s + 2 c3 g2 and eta = prod sqrt(2 a_j) / (4 c3)
// is +-1. The algebraic form is used downstream; the difference quotient is
// kept as a cross-check.

#include <array>
#include <cstddef>
#include <vector>

#include "kovtop/e3_state.hpp"
#include "kovtop/kov_vars.hpp"
#include "kovtop/polynomial.hpp"
#include "kovtop/rigid_dynamics.hpp"

namespace kovtop {

struct KovPolynomials {
  RealPoly p2, p3, p5, q1, q2;
  std::array<Complex, 3> a{};  // roots of P3, lexicographic order
};

RealPoly p2_poly(const IntegralSet& integ);
RealPoly p3_poly(const IntegralSet& integ);
// P5 in the expanded form (s^3 - 2 h1 s^2 + (c4 + h2) s - 2 c3^2) P2(s).
RealPoly p5_expanded(const IntegralSet& integ);

KovPolynomials build_polynomials(const IntegralSet& integ, const FgCoords& fg);

// F(s) = s^2 - S1 s + S2 as a polynomial.
RealPoly spectral_f_poly(const SpectralVars& sv);

// -2 s F(s) - Q2(s)^2 + P3(s) Q1(s).
Complex koetter_residual(const KovPolynomials& polys, const SpectralVars& sv,
                         Complex s);
RealPoly koetter_coefficient_residual(const KovPolynomials& polys,
                                      const SpectralVars& sv);

inline constexpr double kZeroRootTol = 1e-12;
inline constexpr double kImagTol = 1e-8;

// Level-set data shared by every sample of a trajectory.
struct RootBranches {
  std::array<Complex, 3> a{};
  std::array<Complex, 3> sqrt_2a{};  // principal sqrt(2 a_j)
  std::array<Complex, 3> dp3{};      // P3'(a_j)
  std::array<Complex, 3> rho{};      // principal sqrt(P3'(a_j))
  Complex eta{};   // prod sqrt(2 a_j) / (4 c3), equal to +-1
  Complex zeta{};  // Clebsch normalisation sign, equal to +-1
  double h1 = 0, c3 = 0;

  // Same data with the root labels permuted: new j <- old perm[j].
  RootBranches permuted(const std::array<int, 3>& perm) const;
};

// Throws SingularSystem when some a_j = 0 (c3 = 0) and RootCollision when P3
// has a repeated root.
RootBranches root_branches(const IntegralSet& integ);

// x_j = Q2(a_j) / (i sqrt(2 a_j)).
CVec3 x_from_fg(const FgCoords& fg, const RootBranches& br);
// Y_j = R(a_j) / (i sqrt(2 a_j)) for g~ = (g1, -g2, g3).
CVec3 big_y_from_fg(const FgCoords& fg, const RootBranches& br);
// y = (eta / sqrt 2) Y, the algebraic form of the difference-quotient y.
CVec3 y_from_fg(const FgCoords& fg, const RootBranches& br);

// y_j from the difference quotient with the dynamic sqrt(P5(s_i)).
CVec3 y_difference_quotient(const CVec3& x, Complex s1, Complex s2,
                            Complex s1_dot, Complex s2_dot,
                            const RootBranches& br);

// Inverses. Throw NumericalFailure when the result carries an imaginary part
// above tol (relative to 1 + |value|).
Vec3 from_x(const CVec3& x, const RootBranches& br, double tol = kImagTol);
Vec3 from_y(const CVec3& y, const RootBranches& br, double tol = kImagTol);

struct XySample {
  std::size_t index = 0;
  double t = 0;
  Complex s1{}, s2{};
  Complex s1_dot{}, s2_dot{};
  CVec3 x = CVec3::Zero();
  CVec3 y = CVec3::Zero();    // algebraic form
  CVec3 y48 = CVec3::Zero();  // difference quotient with dynamic branches
  bool y48_checked = true;    // false near s_i = a_k
};

struct XyOptions {
  // Samples whose stencil window has min |m2| below this are skipped.
  double min_window_abs_m2 = kChartThreshold;
  // The difference quotient is 0/0 where some s_i meets a root a_k (a turning
  // point of s_i); closer than this it is computed but not compared.
  double node_tol = 1e-3;
};

struct XySeries {
  RootBranches branches;
  std::vector<XySample> samples;
  std::size_t excluded_chart = 0;
  std::size_t excluded_collision = 0;
  double max_eq47 = 0;         // |x_j^2 - (s1 - a_j)(s2 - a_j)|
  double max_eq55 = 0;         // |Q2(a_j) - i sqrt(2 a_j) x_j|
  double max_y_mismatch = 0;   // |y48 - y| over checked samples
  std::size_t y48_unchecked = 0;
  std::size_t branch_jumps = 0;  // unexplained jumps in x or y
};

// Runs over the interior samples of traj. Throws SingularSystem on a_j = 0.
XySeries to_xy(const Trajectory& traj, const XyOptions& opt = {});

// Counts sample-to-sample jumps in a stream that exceed `factor` times the
// adjacent increments. Only compares consecutive grid indices.
std::size_t count_branch_jumps(const std::vector<std::size_t>& index,
                               const std::vector<CVec3>& values,
                               double factor = 10.0);

}  // namespace kovtop
