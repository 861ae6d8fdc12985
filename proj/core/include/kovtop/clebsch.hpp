#pragma once

// The Clebsch case of Kirchhoff's equations (rigid body in an ideal fluid) on
// complexified e(3)*, and the fit that tests whether the Koetter variables of
// a Kovalevskaya trajectory obey it with a diagonal B.
//
// Dictionary (l, p) <- (x, y), frozen after the synthetic self-fit:
//   p_j = x_j / rho_j,   l_j = -(zeta / 2) Y_j / rho_j,
// with rho_j = sqrt(P3'(a_j)), Y = sqrt(2) eta y and zeta = +-1 from
// RootBranches. Then p' = p x l, (l, p) = 0 and |p|^2 = 1 on the image.
//
// Only differences of the B_j enter l' = p x (B p), so B is reported in the
// trace-free gauge B1 + B2 + B3 = 0.

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "kovtop/dopri5.hpp"
#include "kovtop/e3_state.hpp"
#include "kovtop/koetter.hpp"
#include "kovtop/rigid_dynamics.hpp"

namespace kovtop {

using CMat3 = Eigen::Matrix3cd;

struct ClebschState {
  CVec3 l = CVec3::Zero();
  CVec3 p = CVec3::Zero();
  CMat3 B = CMat3::Identity();  // symmetric

  Complex hamiltonian() const;  // (l.l + p.B p) / 2
  Complex lp() const { return l.transpose() * p; }  // bilinear (l, p)
  Complex pp() const { return p.transpose() * p; }
};

struct ClebschRates {
  CVec3 dl = CVec3::Zero();
  CVec3 dp = CVec3::Zero();
};

// dl, dp from the e(3) bracket engine with (l, p) in place of (m, n).
ClebschRates clebsch_eom(const ClebschState& st);
// Closed form: dl = p x (B p), dp = p x l.
ClebschRates clebsch_eom_explicit(const ClebschState& st);

struct ClebschTrajectory {
  std::vector<double> times;
  std::vector<ClebschState> states;
  IntegratorStats stats;
  double sample_dt = 0;
};

ClebschTrajectory integrate_clebsch(const ClebschState& st0,
                                    const Dopri5Options& opt);

// A stream of (l, p) with stencil derivatives at interior samples.
struct ClebschSeries {
  std::vector<double> t;
  std::vector<CVec3> l, p, dl, dp;
  std::size_t excluded = 0;
  double max_lp = 0;       // |(l, p)|
  double max_unit_p = 0;   // |(p, p) - 1|

  std::size_t size() const { return t.size(); }
  // Samples with t in [t0, t1].
  ClebschSeries window(double t0, double t1) const;
  // Samples [begin, end) by position.
  ClebschSeries slice(std::size_t begin, std::size_t end) const;
};

ClebschSeries series_from(const ClebschTrajectory& traj);

// (l, p) image of a chart state.
ClebschState clebsch_image(const FgCoords& fg, const RootBranches& br);

// Maps the Koetter variables of a Kovalevskaya trajectory to (l, p). Samples
// whose stencil window violates min |m2| >= min_window_abs_m2 are excluded.
ClebschSeries map_kovalevskaya(const Trajectory& traj,
                               double min_window_abs_m2 = kChartThreshold);

// Multiplies every p by c (l unchanged); the fitted B then scales by 1/c^2.
ClebschSeries scale_p(const ClebschSeries& s, Complex c);

struct ClebschFit {
  CVec3 B = CVec3::Zero();  // trace-free gauge
  double ldot_residual = 0;  // max |l' - p x B p|
  double pdot_residual = 0;  // max |p' - p x l|
  std::size_t samples = 0;
  double condition = 0;  // sigma_max / sigma_min of the design matrix

  double residual() const { return std::max(ldot_residual, pdot_residual); }
};

inline constexpr std::size_t kMinFitSamples = 10;

// Least squares for B over all samples. Throws ConfigError with fewer than
// kMinFitSamples samples and SingularSystem when the design matrix is rank
// deficient.
ClebschFit fit_diagonal_b(const ClebschSeries& series);

// Trace-free part of a diagonal.
CVec3 trace_free(const CVec3& b);

}  // namespace kovtop
