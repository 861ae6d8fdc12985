#include <gtest/gtest.h>

#include <cmath>

#include "kovtop/errors.hpp"
#include "kovtop/kov_vars.hpp"
#include "kovtop/reference.hpp"
#include "kovtop/stencil.hpp"
#include "oracles.hpp"

namespace kovtop {
namespace {

std::function<Complex(const EuclideanState&)> value_of(Observable o) {
  return [o](const EuclideanState& s) { return o(s).value; };
}

TEST(ToFg, SubstitutionExamples) {
  const FgCoords a = to_fg(EuclideanState(Vec3(1, 1, 0), Vec3(0.4, 0.2, 0)));
  EXPECT_EQ(a.f, Vec3(1, 1, 2));
  EXPECT_EQ(a.g, Vec3::Zero());
  EXPECT_EQ(a.unit_residual(), 0.0);

  const FgCoords b = to_fg(EuclideanState(Vec3(0, 1, 1), Vec3(0, 0, 2)));
  EXPECT_EQ(b.f, Vec3(1, 0, 1));
  EXPECT_EQ(b.g, Vec3(2, 2, -2));
  EXPECT_EQ(b.orthogonality_residual(), 0.0);
}

TEST(ToFg, ThrowsOnChartSingularity) {
  EXPECT_THROW(to_fg(EuclideanState(Vec3(1, 0, 1), Vec3(1, 0, 0))),
               ChartSingularity);
  EXPECT_THROW(to_fg(EuclideanState(Vec3(1, 1e-9, 1), Vec3(1, 0, 0))),
               ChartSingularity);
}

TEST(ToFg, ConstraintsAndSplitOnSampledStates) {
  StateSampler smp(51);
  for (int k = 0; k < 100; ++k) {
    const EuclideanState s = smp.next();
    const FgCoords fg = to_fg(s);
    const IntegralSet in = integrals(s);
    const double scale = 1 + fg.f.cwiseAbs().maxCoeff() * fg.f.cwiseAbs().maxCoeff() +
                         fg.f.cwiseAbs().maxCoeff() * fg.g.cwiseAbs().maxCoeff();
    EXPECT_LT(std::abs(fg.unit_residual()), 1e-12 * scale);
    EXPECT_LT(std::abs(fg.orthogonality_residual()), 1e-12 * scale);
    const SpectralVars sv = s_forms(fg, in);
    const double sc = 1 + std::abs(sv.S1) + std::abs(sv.T1) + std::abs(sv.S2) +
                      std::abs(sv.T2);
    EXPECT_LT(std::abs(sv.S1 + sv.T1 - 2 * in.h1), 1e-9 * sc);
    EXPECT_LT(std::abs(sv.S2 + sv.T2 - in.h2), 1e-9 * sc);
  }
}

TEST(ReconstructN12, RoundTrip) {
  StateSampler smp(52);
  for (int k = 0; k < 100; ++k) {
    const EuclideanState s = smp.next();
    const auto [n1, n2] = reconstruct_n12(s.m, s.n(2), integrals(s));
    const double rho2 = s.m(0) * s.m(0) + s.m(1) * s.m(1);
    const double scale = 1 / std::max(1e-3, std::abs(s.m(1)) * rho2);
    EXPECT_NEAR(n1, s.n(0), 1e-10 * scale);
    EXPECT_NEAR(n2, s.n(1), 1e-10 * scale);
  }
}

TEST(ReconstructN12, ConstructedInstance) {
  const EuclideanState s(Vec3(0, 1, 0), Vec3(0.5, 0.25, 0));
  const auto [n1, n2] = reconstruct_n12(s.m, 0, integrals(s));
  EXPECT_NEAR(n1, 0.5, 1e-15);
  EXPECT_NEAR(n2, 0.25, 1e-15);
}

TEST(ReconstructN12, SingularWhenM2Vanishes) {
  EXPECT_THROW(reconstruct_n12(Vec3(1, 0, 0.3), 0.1, IntegralSet{}),
               SingularSystem);
}

TEST(SForms, GravityFreeChartPoint) {
  // g = 0 puts the whole split in the f forms.
  const EuclideanState s(Vec3(1, 1, 0), Vec3(0.4, 0.2, 0));
  const IntegralSet in = integrals(s);
  const SpectralVars sv = s_forms(to_fg(s), in);
  EXPECT_NEAR(sv.T1, 0, 1e-15);
  EXPECT_NEAR(sv.T2, 0, 1e-15);
  EXPECT_NEAR(sv.S1, 2 * in.h1, 1e-14);
  EXPECT_NEAR(sv.S2, in.h2, 1e-14);
}

TEST(SForms, RootsAndDiscriminant) {
  StateSampler smp(53);
  for (int k = 0; k < 100; ++k) {
    const EuclideanState s = smp.next();
    const SpectralVars sv = s_forms(to_fg(s), integrals(s));
    const double scale = std::max(1.0, sv.S1 * sv.S1 + std::abs(sv.S2));
    EXPECT_NEAR(sv.discriminant, sv.S1 * sv.S1 - 4 * sv.S2, 1e-13 * scale);
    EXPECT_LT(std::abs(sv.s1 + sv.s2 - sv.S1), 1e-12 * scale);
    EXPECT_LT(std::abs(sv.s1 * sv.s2 - sv.S2), 1e-10 * scale);
    EXPECT_LT(std::abs(sv.F(sv.s1)), 1e-10 * scale);
    EXPECT_GE(sv.s1.real(), sv.s2.real());
    EXPECT_NEAR(sv.nu, sv.h1 - sv.S1, 1e-15 * scale);
    // s^2 - S1 s + S2 has real coefficients: a complex pair is conjugate.
    if (sv.discriminant < 0) {
      EXPECT_LT(std::abs(sv.s1 - std::conj(sv.s2)), 1e-12 * scale);
    }
  }
}

TEST(OrderRoots, LexicographicOnRealThenImag) {
  auto [a, b] = order_roots(Complex(1, 0), Complex(2, 0));
  EXPECT_EQ(a, Complex(2, 0));
  EXPECT_EQ(b, Complex(1, 0));
  std::tie(a, b) = order_roots(Complex(1, -1), Complex(1, 1));
  EXPECT_EQ(a, Complex(1, 1));
}

TEST(FgEom, ZeroGGivesZeroDf) {
  const EuclideanState s(Vec3(1, 1, 0), Vec3(0.4, 0.2, 0));
  const FgRates r = fg_eom(to_fg(s), integrals(s));
  EXPECT_EQ(r.df, Vec3::Zero());
  EXPECT_EQ(r.df2_alt, 0.0);
}

TEST(FgEom, MatchesThePushforwardOfTheFlow) {
  StateSampler smp(54);
  for (int k = 0; k < 50; ++k) {
    const EuclideanState s = smp.next();
    if (std::abs(s.m(1)) < 0.3) continue;
    const IntegralSet in = integrals(s);
    const FgRates r = fg_eom(to_fg(s), in);
    // Chain rule through the chart, by a central difference along eom.
    const Vec6 v = eom(s);
    const double h = 1e-5;
    auto fg_at = [&](double e) {
      return to_fg(EuclideanState::from_vector(s.to_vector() + e * v));
    };
    const FgCoords p2 = fg_at(2 * h), p1 = fg_at(h), m1 = fg_at(-h), m2 = fg_at(-2 * h);
    for (int c = 0; c < 3; ++c) {
      const double df = stencil::first_derivative(m2.f(c), m1.f(c), p1.f(c), p2.f(c), h);
      const double dg = stencil::first_derivative(m2.g(c), m1.g(c), p1.g(c), p2.g(c), h);
      EXPECT_NEAR(r.df(c), df, 1e-7 * (1 + std::abs(df)));
      EXPECT_NEAR(r.dg(c), dg, 1e-7 * (1 + std::abs(dg)));
    }
    EXPECT_NEAR(r.df2_alt, r.df(1), 1e-10 * (1 + std::abs(r.df(1))));
  }
}

TEST(SecondDerivative, EquilibriumResidualVanishes) {
  TrajectoryConfig cfg;
  cfg.t_end = 1;
  const Trajectory tr =
      integrate(EuclideanState(Vec3(0, 0.7, 0), Vec3::Zero()), cfg);
  // Both sides vanish; what remains is roundoff in the right-hand side.
  EXPECT_LT(second_derivative_residual(tr, 0.5).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(SecondDerivative, WithinBudgetOnReferenceFamily) {
  const auto states = reference::family_states(55, 1);
  const Trajectory tr = integrate(states[0], reference::config(0.001));
  double worst = 0;
  std::size_t used = 0;
  for (std::size_t i = 2; i + 2 < tr.size() && used < 50; i += 131) {
    if (window_min_abs_m2(tr, i) < reference::kChartWindowMinAbsM2) continue;
    worst = std::max(worst, second_derivative_residual(tr, tr.time(i)).cwiseAbs().maxCoeff());
    ++used;
  }
  EXPECT_EQ(used, 50u);
  EXPECT_LT(worst, 1e-5);
}

TEST(Commutativity, BracketsVanishOnSampledStates) {
  StateSampler smp(56);
  const double lambdas[] = {0.0, 1.0, -1.0, 5.0};
  for (int k = 0; k < 100; ++k) {
    const EuclideanState s = smp.next();
    const CommutativityReport r = commutativity_report(s, lambdas);
    const SpectralVars sv = s_forms(to_fg(s), integrals(s));
    const double scale = std::max(1.0, std::pow(std::abs(sv.S1) + std::abs(sv.S2), 2));
    if (!r.coincident_roots) {
      EXPECT_LT(std::abs(r.s1_s2), 1e-8 * scale);
    }
    EXPECT_LT(std::abs(r.S1_S2), 1e-8 * scale);
    EXPECT_LT(std::abs(r.T1_T2), 1e-8 * scale);
    EXPECT_LT(std::abs(r.h_mixed), 1e-8 * scale);
    ASSERT_EQ(r.lambda.size(), 4u);
    for (const auto& [l, v] : r.lambda) EXPECT_LT(std::abs(v), 1e-8 * scale * (1 + l * l));
  }
}

TEST(Commutativity, S1AgainstExplicitBracketOracle) {
  const EuclideanState s(Vec3(0.3, -0.8, 0.5), Vec3(0.2, 0.6, -0.4));
  const Complex direct = poisson_bracket(observables::S1(), observables::S2(), s);
  const Complex oracle_value = oracle::bracket(oracle::fd_gradient(value_of(observables::S1()), s),
                                               oracle::fd_gradient(value_of(observables::S2()), s), s);
  EXPECT_LT(std::abs(direct), 1e-10);
  EXPECT_LT(std::abs(oracle_value), 1e-6);
}

TEST(Commutativity, S1IsNotAnIntegral) {
  const EuclideanState s(Vec3(0.3, -0.8, 0.5), Vec3(0.2, 0.6, -0.4));
  EXPECT_GT(std::abs(poisson_bracket(observables::S1(), observables::hamiltonian(), s)), 1e-3);
}

TEST(Observables, GradientsMatchFiniteDifferences) {
  const EuclideanState s(Vec3(0.3, -0.8, 0.5), Vec3(0.2, 0.6, -0.4));
  for (const Observable& o : {observables::S1(), observables::S2(), observables::T1(),
                              observables::T2(), observables::s1(), observables::s2(),
                              observables::S1_lambda(2.0), observables::S2_lambda(-1.5)}) {
    const Jet j = o(s);
    const auto fd = oracle::fd_gradient(value_of(o), s);
    for (int k = 0; k < 6; ++k)
      EXPECT_LT(std::abs(j.grad[k] - fd[k]), 1e-7 * (1 + std::abs(j.value)));
  }
}

}  // namespace
}  // namespace kovtop
