#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <vector>

#include "kovtop/errors.hpp"
#include "kovtop/koetter.hpp"
#include "kovtop/reference.hpp"

namespace kovtop {
namespace {

// Plain-array product, independent of Polynomial.
std::vector<double> conv(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> r(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

struct Sample {
  EuclideanState state;
  IntegralSet in;
  FgCoords fg;
  SpectralVars sv;
};

std::vector<Sample> samples(std::uint64_t seed, int count) {
  StateSampler smp(seed);
  std::vector<Sample> out;
  for (int k = 0; k < count; ++k) {
    Sample s{smp.next(), {}, {}, {}};
    s.in = integrals(s.state);
    s.fg = to_fg(s.state);
    s.sv = s_forms(s.fg, s.in);
    out.push_back(s);
  }
  return out;
}

TEST(Polynomials, P3FactorsWhenC3AndC4Vanish) {
  IntegralSet in = IntegralSet::from_constants(1.5, 0.25, 0, 0);
  const RealPoly p3 = p3_poly(in);
  const RealPoly sp2 = RealPoly({0.0, 1.0}) * p2_poly(in);
  for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(p3[k], sp2[k]);
  const KovPolynomials k = build_polynomials(in, FgCoords{Vec3(1, 0, 1), Vec3::Zero()});
  // Roots {0, h1 -+ sqrt(k2)} = {0, 1, 2}.
  EXPECT_NEAR(std::abs(k.a[0]), 0, 1e-14);
  EXPECT_NEAR(k.a[1].real(), 1, 1e-13);
  EXPECT_NEAR(k.a[2].real(), 2, 1e-13);
}

TEST(Polynomials, P5ExpandedMatchesProduct) {
  for (const Sample& s : samples(61, 20)) {
    const KovPolynomials k = build_polynomials(s.in, s.fg);
    const RealPoly e = p5_expanded(s.in);
    const std::vector<double> oracle =
        conv({-2 * s.in.c3 * s.in.c3, s.in.c4 + s.in.h2, -2 * s.in.h1, 1},
             {s.in.h2, -2 * s.in.h1, 1});
    ASSERT_EQ(k.p5.size(), 6u);
    for (std::size_t i = 0; i < 6; ++i) {
      const double scale = std::max(1.0, std::abs(oracle[i]));
      EXPECT_NEAR(k.p5[i], oracle[i], 1e-13 * scale);
      EXPECT_NEAR(e[i], oracle[i], 1e-13 * scale);
    }
  }
}

TEST(Koetter, CoefficientIdentityAgainstConvolutionOracle) {
  for (const Sample& s : samples(62, 100)) {
    const double f1 = s.fg.f(0), f2 = s.fg.f(1), f3 = s.fg.f(2);
    const double h1 = s.in.h1, c3 = s.in.c3;
    const std::vector<double> q2{-2 * c3 * f2, -(f3 + h1 * f1), f1};
    const std::vector<double> q1{-2 * f2 * f2, f1 * f1};
    const std::vector<double> p3{-2 * c3 * c3, s.in.h2 + s.in.c4, -2 * h1, 1};
    const std::vector<double> q22 = conv(q2, q2), p3q1 = conv(p3, q1);
    const std::vector<double> sf{0, -2 * s.sv.S2, 2 * s.sv.S1, -2};
    double oracle_max = 0, scale = 1;
    for (std::size_t i = 0; i < 5; ++i) {
      const double v = (i < sf.size() ? sf[i] : 0) - q22[i] + p3q1[i];
      oracle_max = std::max(oracle_max, std::abs(v));
      scale = std::max(scale, std::abs(q22[i]) + std::abs(p3q1[i]));
    }
    const RealPoly r = koetter_coefficient_residual(build_polynomials(s.in, s.fg), s.sv);
    EXPECT_LT(r.max_abs(), 1e-10 * scale);
    EXPECT_LT(oracle_max, 1e-10 * scale);
  }
}

TEST(Koetter, PointResiduals) {
  for (const Sample& s : samples(63, 100)) {
    const KovPolynomials k = build_polynomials(s.in, s.fg);
    const double scale = std::max(1.0, std::pow(s.fg.f.cwiseAbs().maxCoeff(), 2) *
                                           std::max(1.0, k.p3.max_abs()));
    EXPECT_LT(std::abs(koetter_residual(k, s.sv, 0.0)), 1e-12 * scale);
    for (const Complex a : k.a) {
      const Complex q2 = k.q2(a);
      EXPECT_LT(std::abs(koetter_residual(k, s.sv, a) - (-2.0 * a * s.sv.F(a) - q2 * q2)),
                1e-9 * scale * std::max(1.0, std::pow(std::abs(a), 3)));
    }
    const Complex z(0.7 * s.state.m(0), -1.3 * s.state.n(2));
    EXPECT_LT(std::abs(koetter_residual(k, s.sv, z)),
              1e-10 * scale * std::max(1.0, std::pow(std::abs(z), 5)));
  }
}

TEST(RootBranches, RejectsZeroRoot) {
  EXPECT_THROW(root_branches(IntegralSet::from_constants(1.5, 0.25, 0, 0.3)),
               SingularSystem);
  // A c3 = 0 trajectory fails the transform the same way.
  TrajectoryConfig cfg;
  cfg.t_end = 0.5;
  const Trajectory tr =
      integrate(EuclideanState(Vec3(0.2, 0.9, 0), Vec3(0, 0, 0.4)), cfg);
  ASSERT_EQ(tr.reference_integrals().c3, 0.0);
  EXPECT_THROW(to_xy(tr), SingularSystem);
}

TEST(RootBranches, SignsAreUnitAndRootsSolveP3) {
  for (const Sample& s : samples(64, 50)) {
    // Near c3 = 0 one root sinks under the zero-root rejection.
    if (std::abs(s.in.c3) < 1e-4) continue;
    const RootBranches br = root_branches(s.in);
    EXPECT_NEAR(std::abs(br.eta), 1, 1e-9);
    EXPECT_NEAR(std::abs(br.eta.imag()), 0, 1e-9);
    EXPECT_NEAR(std::abs(br.zeta), 1, 1e-8);
    const RealPoly p3 = p3_poly(s.in);
    for (int j = 0; j < 3; ++j) {
      EXPECT_LT(std::abs(p3(br.a[j])), 1e-10 * std::max(1.0, p3.max_abs()));
      EXPECT_LT(std::abs(br.sqrt_2a[j] * br.sqrt_2a[j] - 2.0 * br.a[j]), 1e-12 * (1 + std::abs(br.a[j])));
    }
  }
}

TEST(XyTransform, WeierstrassRelationsAtSampledStates) {
  for (const Sample& s : samples(65, 100)) {
    const RootBranches br = root_branches(s.in);
    const CVec3 x = x_from_fg(s.fg, br);
    const KovPolynomials k = build_polynomials(s.in, s.fg);
    const double scale = std::max(1.0, std::abs(s.sv.S2) + std::abs(s.sv.S1));
    const Complex I(0, 1);
    for (int j = 0; j < 3; ++j) {
      const Complex a = br.a[j];
      const double sc = scale * std::max(1.0, std::norm(a));
      EXPECT_LT(std::abs(x(j) * x(j) - (s.sv.s1 - a) * (s.sv.s2 - a)), 1e-8 * sc);
      EXPECT_LT(std::abs(k.q2(a) - I * br.sqrt_2a[j] * x(j)), 1e-10 * sc);
    }
  }
}

TEST(XyTransform, RoundTrips) {
  for (const Sample& s : samples(66, 100)) {
    const RootBranches br = root_branches(s.in);
    const Vec3 f = from_x(x_from_fg(s.fg, br), br);
    const Vec3 g = from_y(y_from_fg(s.fg, br), br);
    EXPECT_LT((f - s.fg.f).cwiseAbs().maxCoeff(), 1e-7 * (1 + s.fg.f.cwiseAbs().maxCoeff()));
    EXPECT_LT((g - s.fg.g).cwiseAbs().maxCoeff(), 1e-6 * (1 + s.fg.g.cwiseAbs().maxCoeff()));
  }
}

TEST(XyTransform, RootRelabellingIsCovariant) {
  const Sample s = samples(67, 1).front();
  const RootBranches br = root_branches(s.in);
  const CVec3 x = x_from_fg(s.fg, br), y = y_from_fg(s.fg, br);
  for (const std::array<int, 3> perm : {std::array<int, 3>{1, 0, 2}, {2, 0, 1}, {0, 2, 1}}) {
    const RootBranches pb = br.permuted(perm);
    const CVec3 px = x_from_fg(s.fg, pb), py = y_from_fg(s.fg, pb);
    for (int j = 0; j < 3; ++j) {
      EXPECT_LT(std::abs(px(j) - x(perm[j])), 1e-14 * (1 + std::abs(x(perm[j]))));
      EXPECT_LT(std::abs(py(j) - y(perm[j])), 1e-14 * (1 + std::abs(y(perm[j]))));
    }
    EXPECT_LT((from_x(px, pb) - s.fg.f).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(XyTransform, InverseRejectsInconsistentBranches) {
  const Sample s = samples(68, 1).front();
  const RootBranches br = root_branches(s.in);
  CVec3 x = x_from_fg(s.fg, br);
  x(0) = -x(0);
  EXPECT_THROW(from_x(x, br), NumericalFailure);
  CVec3 y = y_from_fg(s.fg, br);
  y(1) = y(1) + Complex(0.5, 0.5);
  EXPECT_THROW(from_y(y, br), NumericalFailure);
}

TEST(XyTransform, TrajectoryStreamIsContinuousAndConsistent) {
  const auto states = reference::family_states(69, 1);
  const Trajectory tr = integrate(states[0], reference::config(0.001, 5.0));
  XyOptions opt;
  opt.min_window_abs_m2 = reference::kChartWindowMinAbsM2;
  const XySeries xs = to_xy(tr, opt);
  ASSERT_GT(xs.samples.size(), 100u);
  EXPECT_LT(xs.max_eq47, 1e-8);
  EXPECT_LT(xs.max_eq55, 1e-8);
  EXPECT_LT(xs.max_y_mismatch, 1e-5);
  EXPECT_EQ(xs.branch_jumps, 0u);
  // The stream leaves the constraint surface of f untouched.
  for (const XySample& x : xs.samples) {
    const Vec3 f = from_x(x.x, xs.branches);
    EXPECT_NEAR(f(0) * f(2) - f(1) * f(1), 1, 1e-7 * (1 + f.squaredNorm()));
  }
}

TEST(BranchJumps, DetectsASignFlip) {
  std::vector<std::size_t> idx;
  std::vector<CVec3> v;
  for (std::size_t i = 0; i < 20; ++i) {
    idx.push_back(i);
    const double t = 0.01 * static_cast<double>(i);
    v.push_back(CVec3(Complex(1 + t, 0), Complex(t, 0), Complex(2, 0)));
  }
  EXPECT_EQ(count_branch_jumps(idx, v), 0u);
  for (std::size_t i = 10; i < 20; ++i) v[i](0) = -v[i](0);
  EXPECT_GE(count_branch_jumps(idx, v), 1u);
}

}  // namespace
}  // namespace kovtop
