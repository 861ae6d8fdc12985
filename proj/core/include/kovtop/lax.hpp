#pragma once

// Lax representations of the top: the 3x3 pair on e(3)* and the two 2x2
// pairs in the (f, g) chart, with their isospectral invariants.

#include <array>

#include <Eigen/Core>

#include "kovtop/e3_state.hpp"
#include "kovtop/kov_vars.hpp"
#include "kovtop/rigid_dynamics.hpp"

namespace kovtop {

using Mat3 = Eigen::Matrix3d;
using Mat2 = Eigen::Matrix2d;

struct LaxPair3 {
  Mat3 L2 = Mat3::Zero();  // symmetric
  Mat3 M2 = Mat3::Zero();  // antisymmetric
};

// L2 = -A (2 m^2 + gamma n^T + n gamma^T) A, M2 = -A m A with m the hat
// matrix of m, A = diag(1, 1, 0) and gamma = e1.
LaxPair3 build_l2_m2(const EuclideanState& state);

// Determinant of the non-trivial 2x2 block of L2 (the full 3x3 determinant
// vanishes because A kills the third row and column). Equals h2.
double det_l2_block(const Mat3& L2);

// det(s I - L2) = s (s^2 - 2 h1 s + h2).
Complex spectral_poly_l2(const EuclideanState& state, Complex s);

// The two non-trivial coefficients (-2 h1, h2) of det(sI - L2)/s, recovered by
// evaluating the determinant at s in {-1, 0, 1, 2} and solving the Vandermonde
// system for the cubic.
std::array<double, 2> isospectral_coefficients(const EuclideanState& state);

struct SmallLax {
  Mat2 L = Mat2::Zero();  // [[f2, f1], [-f3, -f2]]
  Mat2 M = Mat2::Zero();  // (1/4) [[-g2, g1], [-g3, g2]]
  Mat2 N = Mat2::Zero();
};

inline constexpr double kConstraintTol = 1e-8;

// Throws ConstraintViolation when f1 f3 - f2^2 = 1 or the orthogonality
// constraint fails by more than tol.
SmallLax build_small_lax(const FgCoords& fg, const IntegralSet& integ,
                         double tol = kConstraintTol);

enum class LaxKind { three_by_three, small_f, small_g };

// Max-norm of dX/dt - [P, Q] at grid time t, with dX/dt from the five-point
// stencil and (X, P, Q) = (L2, L2, M2), (L, L, M) or (M, L, N).
double lax_residual(const Trajectory& traj, LaxKind which, double t);

const char* to_string(LaxKind which);

}  // namespace kovtop
