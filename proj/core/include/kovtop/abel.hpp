#pragma once

// The identity F H - G^2 = 2 P5, the Abel-Jacobi form of the flow in the
// separation variables, quadrature of the Abel map along a trajectory, and
// the 2x2 Lax pair with spectral parameter.
//
// Branch of sqrt(2 P5(s_i)): fixed from the dynamics at the first sample of
// each segment, w_i = -i (s_i - s_other) s_i', then continued by choosing the
// sign of the principal root nearest a polynomial extrapolation of the
// previous accepted values. Samples near a branch point (|w_i| small) are
// flagged, never used for extrapolation, and bridged in the quadrature.
//
// Segments. In the chart used here s2 runs off to infinity when m2 passes
// through zero, so trajectories split into segments of usable samples. A gap
// of more than max_bridge samples ends a segment; each segment carries its own
// branch reference and its own Abel-map origin.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "kovtop/e3_state.hpp"
#include "kovtop/kov_vars.hpp"
#include "kovtop/polynomial.hpp"
#include "kovtop/rigid_dynamics.hpp"

namespace kovtop {

struct SDot {
  double S1 = 0, S2 = 0;
};

// Exact rates along the flow, grad S . eom (equal to {H, S}).
SDot sdot_bracket(const EuclideanState& state);
// Five-point stencil rates with the trajectory's reference constants.
SDot sdot_stencil(const Trajectory& traj, std::size_t i);

struct WeierstrassTriple {
  RealPoly F;  // s^2 - S1 s + S2
  RealPoly G;  // S1' s - S2'
  RealPoly H;  // 2 (s^3 - b1 s^2 + b2 s - b3)
  double b1 = 0, b2 = 0, b3 = 0;
};

WeierstrassTriple build_fgh(const SpectralVars& sv, const SDot& sdot,
                            const IntegralSet& integ);

// Coefficients of F H - G^2 - 2 P5.
RealPoly eq60_residual(const WeierstrassTriple& w, const IntegralSet& integ);
// max |coefficient residual| over the largest coefficient of |F| |H| +
// |G|^2 or 2 |P5| (and at least 1).
double eq60_relative_residual(const WeierstrassTriple& w,
                              const IntegralSet& integ);

// i (s_self - s_other)^{-1} sqrt(2 P5(s_self)).
Complex abel_jacobi_rate(Complex s_self, Complex s_other, Complex sqrt_2p5);

struct AbelOptions {
  double min_window_abs_m2 = kChartThreshold;
  // |w_i| / |s1 - s2| below this marks a sample as near a branch point.
  double branch_point_tol = 1e-3;
  std::size_t max_bridge = 5;
};

struct AbelSample {
  std::size_t index = 0;
  double t = 0;
  std::size_t segment = 0;
  bool reference = false;     // branch-fixing sample of its segment
  bool near_branch = false;   // excluded from residual statistics
  std::array<Complex, 2> s{}, s_dot{}, w{}, r{};
};

struct AbelJacobiStream {
  std::vector<AbelSample> samples;
  std::size_t segments = 0;
  std::size_t excluded_chart = 0;
  std::size_t excluded_collision = 0;
  std::size_t near_branch = 0;
  double sample_dt = 0;
  std::size_t max_bridge = 5;

  // Residual pair at grid time t. Throws OutOfRange when t is not a usable
  // sample and RootCollision when it was excluded as a collision.
  std::pair<Complex, Complex> residual_at(double t) const;
  // Largest |r| over samples that are neither references nor near branches.
  double max_residual() const;
  std::size_t checked() const;

  std::vector<double> collision_times;
};

AbelJacobiStream abel_jacobi_stream(const Trajectory& traj,
                                    const AbelOptions& opt = {});

std::pair<Complex, Complex> abel_jacobi_residual(const AbelJacobiStream& s,
                                                 double t);

struct AbelSegment {
  std::vector<std::size_t> index;
  std::vector<double> t;
  std::vector<std::array<Complex, 2>> u;
  std::size_t bridged = 0;
  Complex slope_u2{};    // least-squares du2/dt
  double u1_drift = 0;   // max |u1(t) - u1(t0)|
};

struct AbelIncrements {
  std::vector<AbelSegment> segments;
  std::size_t rejected_gaps = 0;  // gaps longer than max_bridge

  // Largest |u1 drift| and |slope - i| over segments with >= min_samples.
  double max_u1_drift(std::size_t min_samples = 10) const;
  double max_slope_error(std::size_t min_samples = 10) const;
};

// Trapezoidal quadrature of du1 = sum ds_i / w_i, du2 = sum s_i ds_i / w_i.
AbelIncrements abel_increments(const AbelJacobiStream& stream);
AbelIncrements abel_increments(const Trajectory& traj,
                               const AbelOptions& opt = {});

using CMat2 = Eigen::Matrix2cd;

struct SpectralLax {
  CMat2 L = CMat2::Zero();  // [[G, F], [-H, -G]]
  CMat2 M = CMat2::Zero();  // F^{-1} [[0, 0], [C, D]]
  Complex det{};            // F H - G^2
};

inline constexpr double kPoleTol = 1e-10;

// Throws RootCollision when |F(s)| < kPoleTol (s at s1 or s2).
SpectralLax spectral_lax(const WeierstrassTriple& w, double T1, Complex s);

// Max-norm of dL(s)/dt (stencil over a stream built with bracket rates) minus
// [L(s), M(s)] at interior sample i.
double spectral_lax_residual(const Trajectory& traj, std::size_t i, Complex s);

// `count` seeded points in [-3, 3]^2 outside disks of `radius` around `avoid`.
std::vector<Complex> spectral_points(std::uint64_t seed, std::size_t count,
                                     std::span<const Complex> avoid,
                                     double radius = 0.1);

}  // namespace kovtop
