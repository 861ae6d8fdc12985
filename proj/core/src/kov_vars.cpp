#include "kovtop/kov_vars.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kovtop/errors.hpp"

namespace kovtop {

double FgCoords::unit_residual() const {
  return f(0) * f(2) - f(1) * f(1) - 1.0;
}

double FgCoords::orthogonality_residual() const {
  return f(0) * g(2) + 2 * f(1) * g(1) + f(2) * g(0);
}

FgCoords to_fg(const EuclideanState& s, double threshold) {
  const double m1 = s.m(0), m2 = s.m(1), m3 = s.m(2), n3 = s.n(2);
  if (!(std::abs(m2) >= threshold))
    throw ChartSingularity("chart singular: |m2| = " +
                           std::to_string(std::abs(m2)));
  const double rho2 = m1 * m1 + m2 * m2;
  FgCoords out;
  out.f << 1.0 / m2, m1 / m2, rho2 / m2;
  out.g << 2 * m3 / m2, n3 / m2, -(2 / m2) * (rho2 * m3 + m1 * n3);
  return out;
}

std::pair<double, double> reconstruct_n12(const Vec3& m, double n3,
                                          const IntegralSet& in) {
  const double m1 = m(0), m2 = m(1), m3 = m(2);
  const double rho2 = m1 * m1 + m2 * m2;
  const double det = m2 * rho2;
  if (std::abs(det) < 1e-14)
    throw SingularSystem("n1/n2 system singular: m2 (m1^2 + m2^2) = 0");
  const double r1 = in.c3 - m3 * n3;
  const double r2 = 0.5 * (n3 * n3 - rho2 * rho2 + in.k2 - in.c4);
  // [m1, m2; m1^2 - m2^2, 2 m1 m2] (n1, n2) = (r1, r2)
  const double a = m1, b = m2, c = m1 * m1 - m2 * m2, d = 2 * m1 * m2;
  return {(r1 * d - b * r2) / det, (a * r2 - c * r1) / det};
}

std::pair<Complex, Complex> order_roots(Complex a, Complex b) {
  if (a.real() > b.real() || (a.real() == b.real() && a.imag() >= b.imag()))
    return {a, b};
  return {b, a};
}

namespace {

struct Forms {
  double S1, S2, T1, T2;
};

Forms evaluate_forms(const Vec3& f, const Vec3& g, double h1, double h2,
                     double c3, double c4) {
  const double f1 = f(0), f2 = f(1), f3 = f(2);
  const double g1 = g(0), g2 = g(1), g3 = g(2);
  const double w = f3 + h1 * f1;
  const double z = h1 * g1 - g3;
  Forms o;
  o.S1 = 0.5 * (w * w - 4 * c3 * f1 * f2 - (c4 + h2) * f1 * f1 -
                4 * h1 * f2 * f2);
  o.S2 = -2 * c3 * w * f2 - (c4 + h2) * f2 * f2 - c3 * c3 * f1 * f1;
  o.T1 = 0.5 * (-g1 * g3 + g2 * g2);
  o.T2 = 0.25 * (z * z - (c4 + h2) * g1 * g1 + 4 * c3 * g1 * g2);
  return o;
}

}  // namespace

SpectralVars s_forms(const FgCoords& fg, const IntegralSet& in) {
  const Forms fo = evaluate_forms(fg.f, fg.g, in.h1, in.h2, in.c3, in.c4);
  SpectralVars sv;
  sv.S1 = fo.S1;
  sv.S2 = fo.S2;
  sv.T1 = fo.T1;
  sv.T2 = fo.T2;
  sv.h1 = in.h1;
  sv.h2 = in.h2;
  sv.nu = in.h1 - fo.S1;
  sv.discriminant = fo.S1 * fo.S1 - 4 * fo.S2;
  const Complex root = std::sqrt(Complex(sv.discriminant, 0.0));
  std::tie(sv.s1, sv.s2) =
      order_roots(0.5 * (fo.S1 + root), 0.5 * (fo.S1 - root));
  sv.double_root =
      std::abs(sv.s1 - sv.s2) < kRootCollisionTol * (1 + std::abs(sv.s1));
  return sv;
}

FgRates fg_eom(const FgCoords& fg, const IntegralSet& in) {
  const double f1 = fg.f(0), f2 = fg.f(1), f3 = fg.f(2);
  const double g1 = fg.g(0), g2 = fg.g(1), g3 = fg.g(2);
  const double c3 = in.c3, h1 = in.h1;
  FgRates r;
  r.df << 0.5 * (f1 * g2 + f2 * g1), -0.5 * (f1 * g3 + f2 * g2),
      -0.5 * (f2 * g3 + f3 * g2);
  r.df2_alt = 0.25 * (-f1 * g3 + f3 * g1);
  r.dg << c3 * f1 * f1 + h1 * f1 * f2 - f2 * f3,
      0.5 * in.gamma4 * f1 * f1 + c3 * f1 * f2 + 0.5 * f3 * f3,
      -c3 * (f1 * f3 + 2 * f2 * f2) - h1 * f2 * f3 - in.gamma4 * f1 * f2;
  return r;
}

Vec3 fg_second_derivative(const FgCoords& fg, const IntegralSet& in) {
  const double f1 = fg.f(0), f2 = fg.f(1), f3 = fg.f(2);
  const double nu = in.h1 - s_forms(fg, in).S1;
  const double h1 = in.h1, c3 = in.c3;
  return Vec3(nu * f1 + 0.5 * (h1 * f1 + f3),
              nu * f2 + (h1 * f2 + 0.5 * c3 * f1),
              nu * f3 + 0.5 * (h1 * f3 - 2 * c3 * f2 - in.gamma4 * f1));
}

Vec3 second_derivative_residual(const Trajectory& traj, double t) {
  const std::size_t i = traj.interior_index(t);
  const Vec3 fdd = second_time_derivative(
      traj, i, [](const EuclideanState& s) -> Vec3 { return to_fg(s).f; });
  return fdd - fg_second_derivative(to_fg(traj.state(i)),
                                    traj.reference_integrals());
}

double window_min_abs_m2(const Trajectory& traj, std::size_t i) {
  const std::size_t lo = i >= 2 ? i - 2 : 0;
  const std::size_t hi = std::min(i + 2, traj.size() - 1);
  double v = std::numeric_limits<double>::infinity();
  for (std::size_t k = lo; k <= hi; ++k)
    v = std::min(v, std::abs(traj.state(k).m(1)));
  return v;
}

// ---------------------------------------------------------------------------
// Observables with hand-coded chain-rule gradients.

namespace {

using Grad = std::array<double, 6>;

struct ChartJet {
  Vec3 f, g;
  std::array<Grad, 3> df{}, dg{};
};

ChartJet chart_jet(const EuclideanState& s) {
  const FgCoords fg = to_fg(s);
  const double m1 = s.m(0), m2 = s.m(1), m3 = s.m(2), n3 = s.n(2);
  const double m22 = m2 * m2;
  ChartJet j;
  j.f = fg.f;
  j.g = fg.g;
  // Variables ordered (m1, m2, m3, n1, n2, n3).
  j.df[0] = {0, -1 / m22, 0, 0, 0, 0};
  j.df[1] = {1 / m2, -m1 / m22, 0, 0, 0, 0};
  j.df[2] = {2 * m1 / m2, 1 - m1 * m1 / m22, 0, 0, 0, 0};
  j.dg[0] = {0, -2 * m3 / m22, 2 / m2, 0, 0, 0};
  j.dg[1] = {0, -n3 / m22, 0, 0, 0, 1 / m2};
  j.dg[2] = {-2 * (2 * m1 * m3 + n3) / m2,
             -2 * (m3 - (m1 * m1 * m3 + m1 * n3) / m22),
             -2 * (m1 * m1 + m22) / m2,
             0,
             0,
             -2 * m1 / m2};
  return j;
}

struct ConstJets {
  double h1, h2, c3, c4;
  Grad dh1, dh2, dc3, dc4;
};

Grad real_grad(const Jet& j) {
  Grad g;
  for (int k = 0; k < 6; ++k) g[k] = j.grad[k].real();
  return g;
}

ConstJets const_jets(const EuclideanState& s) {
  const Jet a = observables::h1_jet(s), b = observables::h2_jet(s);
  const Jet c = observables::c3_jet(s), d = observables::c4_jet(s);
  return {a.value.real(), b.value.real(), c.value.real(), d.value.real(),
          real_grad(a),   real_grad(b),   real_grad(c),   real_grad(d)};
}

// Partial derivatives of one form with respect to f, g and the constants.
struct Partials {
  double value = 0;
  Vec3 wrt_f = Vec3::Zero(), wrt_g = Vec3::Zero();
  double wrt_h1 = 0, wrt_h2 = 0, wrt_c3 = 0, wrt_c4 = 0;
};

Jet assemble(const Partials& p, const ChartJet& cj, const ConstJets& k) {
  Jet out;
  out.value = p.value;
  for (int v = 0; v < 6; ++v) {
    double acc = p.wrt_h1 * k.dh1[v] + p.wrt_h2 * k.dh2[v] +
                 p.wrt_c3 * k.dc3[v] + p.wrt_c4 * k.dc4[v];
    for (int i = 0; i < 3; ++i)
      acc += p.wrt_f(i) * cj.df[i][v] + p.wrt_g(i) * cj.dg[i][v];
    out.grad[v] = acc;
  }
  return out;
}

enum class Form { S1, S2, T1, T2 };

Partials form_partials(Form which, const ChartJet& cj, const ConstJets& k) {
  const double f1 = cj.f(0), f2 = cj.f(1), f3 = cj.f(2);
  const double g1 = cj.g(0), g2 = cj.g(1), g3 = cj.g(2);
  const double h1 = k.h1, h2 = k.h2, c3 = k.c3, c4 = k.c4;
  const double w = f3 + h1 * f1;
  const double z = h1 * g1 - g3;
  const Forms fo = evaluate_forms(cj.f, cj.g, h1, h2, c3, c4);
  Partials p;
  switch (which) {
    case Form::S1:
      p.value = fo.S1;
      p.wrt_f << w * h1 - 2 * c3 * f2 - (c4 + h2) * f1,
          -2 * c3 * f1 - 4 * h1 * f2, w;
      p.wrt_h1 = w * f1 - 2 * f2 * f2;
      p.wrt_h2 = -0.5 * f1 * f1;
      p.wrt_c3 = -2 * f1 * f2;
      p.wrt_c4 = -0.5 * f1 * f1;
      break;
    case Form::S2:
      p.value = fo.S2;
      p.wrt_f << -2 * c3 * h1 * f2 - 2 * c3 * c3 * f1,
          -2 * c3 * w - 2 * (c4 + h2) * f2, -2 * c3 * f2;
      p.wrt_h1 = -2 * c3 * f1 * f2;
      p.wrt_h2 = -f2 * f2;
      p.wrt_c3 = -2 * w * f2 - 2 * c3 * f1 * f1;
      p.wrt_c4 = -f2 * f2;
      break;
    case Form::T1:
      p.value = fo.T1;
      p.wrt_g << -0.5 * g3, g2, -0.5 * g1;
      break;
    case Form::T2:
      p.value = fo.T2;
      p.wrt_g << 0.5 * z * h1 - 0.5 * (c4 + h2) * g1 + c3 * g2, c3 * g1,
          -0.5 * z;
      p.wrt_h1 = 0.5 * z * g1;
      p.wrt_h2 = -0.25 * g1 * g1;
      p.wrt_c3 = g1 * g2;
      p.wrt_c4 = -0.25 * g1 * g1;
      break;
  }
  return p;
}

Jet form_jet(Form which, const EuclideanState& s) {
  const ChartJet cj = chart_jet(s);
  const ConstJets k = const_jets(s);
  return assemble(form_partials(which, cj, k), cj, k);
}

Jet add_scaled(const Jet& a, double scale, const Jet& b) {
  Jet out = a;
  out.value += scale * b.value;
  for (int v = 0; v < 6; ++v) out.grad[v] += scale * b.grad[v];
  return out;
}

// Root jet by implicit differentiation of s^2 - S1 s + S2 = 0.
Jet root_jet(const EuclideanState& s, bool first) {
  const Jet a = form_jet(Form::S1, s);
  const Jet b = form_jet(Form::S2, s);
  const double S1 = a.value.real(), S2 = b.value.real();
  const Complex disc = std::sqrt(Complex(S1 * S1 - 4 * S2, 0.0));
  const auto [r1, r2] = order_roots(0.5 * (S1 + disc), 0.5 * (S1 - disc));
  if (std::abs(r1 - r2) < kRootCollisionTol * (1 + std::abs(r1)))
    throw RootCollision("s1 = s2: root gradient undefined");
  const Complex r = first ? r1 : r2;
  Jet out;
  out.value = r;
  const Complex denom = 2.0 * r - S1;
  for (int v = 0; v < 6; ++v)
    out.grad[v] = (r * a.grad[v] - b.grad[v]) / denom;
  return out;
}

}  // namespace

namespace observables {

Observable S1() {
  return [](const EuclideanState& s) { return form_jet(Form::S1, s); };
}
Observable S2() {
  return [](const EuclideanState& s) { return form_jet(Form::S2, s); };
}
Observable T1() {
  return [](const EuclideanState& s) { return form_jet(Form::T1, s); };
}
Observable T2() {
  return [](const EuclideanState& s) { return form_jet(Form::T2, s); };
}
Observable s1() {
  return [](const EuclideanState& s) { return root_jet(s, true); };
}
Observable s2() {
  return [](const EuclideanState& s) { return root_jet(s, false); };
}
Observable S1_lambda(double lambda) {
  return [lambda](const EuclideanState& s) {
    return add_scaled(form_jet(Form::S1, s), 2 * lambda, h1_jet(s));
  };
}
Observable S2_lambda(double lambda) {
  return [lambda](const EuclideanState& s) {
    return add_scaled(form_jet(Form::S2, s), lambda, h2_jet(s));
  };
}

}  // namespace observables

CommutativityReport commutativity_report(const EuclideanState& state,
                                         std::span<const double> lambdas) {
  using namespace observables;
  CommutativityReport r;
  const Jet jS1 = S1()(state), jS2 = S2()(state);
  const Jet jT1 = T1()(state), jT2 = T2()(state);
  const Jet jH1 = h1_jet(state), jH2 = h2_jet(state);
  r.S1_S2 = poisson_bracket(jS1, jS2, state);
  r.T1_T2 = poisson_bracket(jT1, jT2, state);
  r.h_mixed = 2.0 * poisson_bracket(jH1, jS2, state) -
              poisson_bracket(jH2, jS1, state);
  try {
    r.s1_s2 = poisson_bracket(s1()(state), s2()(state), state);
  } catch (const RootCollision&) {
    r.coincident_roots = true;
  }
  for (double lambda : lambdas)
    r.lambda.emplace_back(lambda, poisson_bracket(S1_lambda(lambda)(state),
                                                  S2_lambda(lambda)(state),
                                                  state));
  return r;
}

}  // namespace kovtop
