#include <gtest/gtest.h>

#include <cmath>

#include "kovtop/errors.hpp"
#include "kovtop/kov_vars.hpp"
#include "kovtop/lax.hpp"
#include "kovtop/reference.hpp"

namespace kovtop {
namespace {

TEST(LaxPair3, GravityOnlyState) {
  const LaxPair3 p = build_l2_m2(EuclideanState(Vec3::Zero(), Vec3(1, 0, 0)));
  Mat3 expected = Mat3::Zero();
  expected(0, 0) = -2;
  EXPECT_EQ(p.L2, expected);
  EXPECT_EQ(p.M2, Mat3::Zero());
  EXPECT_DOUBLE_EQ(p.L2.trace(), 2 * -1.0);
}

TEST(LaxPair3, StructureAndInvariants) {
  StateSampler smp(31);
  for (int k = 0; k < 100; ++k) {
    const EuclideanState s = smp.next();
    const LaxPair3 p = build_l2_m2(s);
    const IntegralSet in = integrals(s);
    EXPECT_LT((p.L2 - p.L2.transpose()).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT((p.M2 + p.M2.transpose()).cwiseAbs().maxCoeff(), 1e-15);
    for (int c = 0; c < 3; ++c) {
      EXPECT_EQ(p.L2(2, c), 0.0);
      EXPECT_EQ(p.L2(c, 2), 0.0);
      EXPECT_EQ(p.M2(2, c), 0.0);
    }
    EXPECT_LT(std::abs(p.L2.trace() - 2 * in.h1), 1e-12);
    EXPECT_LT(std::abs(det_l2_block(p.L2) - (in.h1 * in.h1 - in.k2)),
              1e-10 * std::max(1.0, std::abs(in.h2)));
    const Mat3 comm = p.L2 * p.M2 - p.M2 * p.L2;
    EXPECT_LT(std::abs(comm.trace()), 1e-12);
  }
}

TEST(SpectralPoly, FactorsThroughP2) {
  StateSampler smp(32);
  for (int k = 0; k < 50; ++k) {
    const EuclideanState s = smp.next();
    const IntegralSet in = integrals(s);
    EXPECT_EQ(spectral_poly_l2(s, 0.0), Complex(0));
    const Complex disc = std::sqrt(Complex(in.h1 * in.h1 - in.h2));
    for (Complex root : {in.h1 + disc, in.h1 - disc})
      EXPECT_LT(std::abs(spectral_poly_l2(s, root)),
                1e-9 * std::max(1.0, std::pow(std::abs(root), 3)));
    const Complex z(0.3, -1.7);
    EXPECT_LT(std::abs(spectral_poly_l2(s, z) -
                       z * (z * z - 2 * in.h1 * z + in.h2)),
              1e-10 * std::max(1.0, std::abs(in.h2)));
  }
}

TEST(SpectralPoly, CoefficientsConstantAlongTrajectory) {
  const auto states = reference::family_states(40, 1);
  const Trajectory tr = integrate(states[0], reference::config(0.01));
  const auto c0 = isospectral_coefficients(tr.state(0));
  const IntegralSet in = tr.reference_integrals();
  EXPECT_NEAR(c0[0], -2 * in.h1, 1e-12);
  EXPECT_NEAR(c0[1], in.h2, 1e-10);
  for (const auto& s : tr.states()) {
    const auto c = isospectral_coefficients(s);
    for (int k = 0; k < 2; ++k)
      EXPECT_LT(std::abs(c[k] - c0[k]) / std::max(1.0, std::abs(c0[k])), 1e-8);
  }
}

TEST(SmallLax, SubstitutionExample) {
  // m = (1, 1, 0), n3 = 0 gives f = (1, 1, 2), g = 0.
  const FgCoords fg = to_fg(EuclideanState(Vec3(1, 1, 0), Vec3(0.3, -0.3, 0)));
  const SmallLax lax = build_small_lax(fg, integrals(EuclideanState(
                                               Vec3(1, 1, 0), Vec3(0.3, -0.3, 0))));
  Mat2 L;
  L << 1, 1, -2, -1;
  EXPECT_LT((lax.L - L).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(lax.M, Mat2::Zero());
  EXPECT_NEAR(lax.L.determinant(), 1, 1e-15);
}

TEST(SmallLax, MatricesAgainstDirectEvaluation) {
  StateSampler smp(33);
  for (int k = 0; k < 20; ++k) {
    const EuclideanState s = smp.next();
    const FgCoords fg = to_fg(s);
    const IntegralSet in = integrals(s);
    const SmallLax lax = build_small_lax(fg, in);
    const double f1 = fg.f(0), f2 = fg.f(1), f3 = fg.f(2);
    const double g1 = fg.g(0), g2 = fg.g(1), g3 = fg.g(2);
    const double c3 = in.c3, h1 = in.h1, gm = in.gamma4;
    Mat2 M, N;
    M << -g2 / 4, g1 / 4, -g3 / 4, g2 / 4;
    const double a = c3 * f1 + 2 * h1 * f2;
    N << -a / 8, -(f3 + h1 * f1) / 8, -(gm * f1 + 2 * c3 * f2 - h1 * f3) / 8,
        a / 8;
    EXPECT_LT((lax.M - M).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_LT((lax.N - N).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(lax.L.trace(), 0, 0);
    EXPECT_NEAR(lax.M.trace(), 0, 0);
    EXPECT_NEAR(lax.N.trace(), 0, 1e-15);
    EXPECT_NEAR(lax.L.determinant(), 1, 1e-10);
  }
}

TEST(SmallLax, RejectsOffConstraintInput) {
  FgCoords fg;
  fg.f = Vec3(1, 0, 2);  // f1 f3 - f2^2 = 2
  EXPECT_THROW(build_small_lax(fg, IntegralSet{}), ConstraintViolation);
}

TEST(LaxResidual, EquilibriumVanishes) {
  // m = (0, m2, 0), n = 0 is an equilibrium with a valid chart.
  TrajectoryConfig cfg;
  cfg.t_end = 1;
  const Trajectory tr =
      integrate(EuclideanState(Vec3(0, 0.7, 0), Vec3::Zero()), cfg);
  for (auto kind : {LaxKind::three_by_three, LaxKind::small_f, LaxKind::small_g})
    EXPECT_LT(lax_residual(tr, kind, 0.5), 1e-12) << to_string(kind);
}

TEST(LaxResidual, WithinBudgetOnReferenceFamily) {
  const auto states = reference::family_states(41, 1);
  const Trajectory tr = integrate(states[0], reference::config(0.01));
  double worst = 0;
  const std::size_t step = (tr.size() - 4) / 50;
  for (std::size_t i = 2; i + 2 < tr.size(); i += step)
    worst = std::max(worst, lax_residual(tr, LaxKind::three_by_three, tr.time(i)));
  EXPECT_LT(worst, 1e-6);

  const Trajectory fine = integrate(states[0], reference::config(0.001));
  double wf = 0, wg = 0;
  std::size_t used = 0;
  for (std::size_t i = 2; i + 2 < fine.size() && used < 50; i += 97) {
    if (window_min_abs_m2(fine, i) < reference::kChartWindowMinAbsM2) continue;
    wf = std::max(wf, lax_residual(fine, LaxKind::small_f, fine.time(i)));
    wg = std::max(wg, lax_residual(fine, LaxKind::small_g, fine.time(i)));
    ++used;
  }
  EXPECT_EQ(used, 50u);
  EXPECT_LT(wf, 1e-6);
  EXPECT_LT(wg, 1e-6);
}

TEST(LaxResidual, FourthOrderUnderHalving) {
  const auto states = reference::family_states(42, 1);
  const Trajectory a = integrate(states[0], reference::config(0.02));
  const Trajectory b = integrate(states[0], reference::config(0.01));
  double ra = 0, rb = 0;
  for (std::size_t i = 2; i + 2 < a.size(); ++i) {
    ra = std::max(ra, lax_residual(a, LaxKind::three_by_three, a.time(i)));
    rb = std::max(rb, lax_residual(b, LaxKind::three_by_three, a.time(i)));
  }
  EXPECT_NEAR(std::log2(ra / rb), 4.0, 0.5);
}

TEST(LaxResidual, RejectsBoundaryTimes) {
  TrajectoryConfig cfg;
  cfg.t_end = 1;
  const Trajectory tr =
      integrate(EuclideanState(Vec3(0.1, 0.7, 0.2), Vec3(0.3, 0, 0)), cfg);
  EXPECT_THROW(lax_residual(tr, LaxKind::three_by_three, 0.0), OutOfRange);
  EXPECT_THROW(lax_residual(tr, LaxKind::small_f, 1.0), OutOfRange);
}

}  // namespace
}  // namespace kovtop
