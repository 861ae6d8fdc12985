#include "kovtop/e3_state.hpp"

#include <cmath>
#include <stdexcept>

namespace kovtop {

EuclideanState EuclideanState::from_vector(const Vec6& v) {
  return EuclideanState(v.head<3>(), v.tail<3>());
}

Vec6 EuclideanState::to_vector() const {
  Vec6 v;
  v << m, n;
  return v;
}

bool EuclideanState::finite() const { return m.allFinite() && n.allFinite(); }

IntegralSet IntegralSet::from_constants(double h1, double k2, double c3,
                                        double c4) {
  IntegralSet out;
  out.h1 = h1;
  out.k2 = k2;
  out.c3 = c3;
  out.c4 = c4;
  out.h2 = h1 * h1 - k2;
  out.gamma4 = c4 - k2;
  return out;
}

IntegralSet integrals(const EuclideanState& s) {
  const auto& m = s.m;
  const auto& n = s.n;
  const double h1 = m(0) * m(0) + m(1) * m(1) + 2 * m(2) * m(2) - n(0);
  // xi_+ = (m1 + i m2)^2 + (n1 + i n2) = u + i v; xi_- is its conjugate.
  const double u = m(0) * m(0) - m(1) * m(1) + n(0);
  const double v = 2 * m(0) * m(1) + n(1);
  const double k2 = u * u + v * v;
  return IntegralSet::from_constants(h1, k2, m.dot(n), n.squaredNorm());
}

Complex lie_poisson(const std::array<Complex, 6>& gf,
                    const std::array<Complex, 6>& gg, const CVec3& m,
                    const CVec3& n) {
  const CVec3 fm(gf[0], gf[1], gf[2]);
  const CVec3 fn(gf[3], gf[4], gf[5]);
  const CVec3 gm(gg[0], gg[1], gg[2]);
  const CVec3 gn(gg[3], gg[4], gg[5]);
  // Plain (non-conjugating) dot products: the bracket is bilinear.
  const CVec3 mm = cross3(fm, gm);
  const CVec3 mn = cross3(fm, gn) + cross3(fn, gm);
  return (m.array() * mm.array()).sum() + (n.array() * mn.array()).sum();
}

Complex poisson_bracket(const Jet& f, const Jet& g, const EuclideanState& s) {
  return lie_poisson(f.grad, g.grad, s.m.cast<Complex>(), s.n.cast<Complex>());
}

Complex poisson_bracket(const Observable& f, const Observable& g,
                        const EuclideanState& s) {
  return poisson_bracket(f(s), g(s), s);
}

Vec3 angular_velocity(const EuclideanState& s) {
  return Vec3(s.m(0), s.m(1), 2 * s.m(2));
}

namespace observables {
namespace {

Jet coordinate(const EuclideanState& s, int k) {
  Jet j;
  j.value = k < 3 ? s.m(k) : s.n(k - 3);
  j.grad[k] = 1.0;
  return j;
}

int checked_index(int i) {
  if (i < 0 || i > 2) throw std::out_of_range("coordinate index must be 0..2");
  return i;
}

}  // namespace

Jet h1_jet(const EuclideanState& s) {
  const auto& m = s.m;
  Jet j;
  j.value = m(0) * m(0) + m(1) * m(1) + 2 * m(2) * m(2) - s.n(0);
  j.grad = {2 * m(0), 2 * m(1), 4 * m(2), -1.0, 0.0, 0.0};
  return j;
}

Jet h2_tilde_jet(const EuclideanState& s) {
  const auto& m = s.m;
  const auto& n = s.n;
  const double u = m(0) * m(0) - m(1) * m(1) + n(0);
  const double v = 2 * m(0) * m(1) + n(1);
  Jet j;
  j.value = u * u + v * v;
  j.grad = {2 * u * 2 * m(0) + 2 * v * 2 * m(1),
            2 * u * (-2 * m(1)) + 2 * v * 2 * m(0),
            0.0,
            2 * u,
            2 * v,
            0.0};
  return j;
}

Jet h2_jet(const EuclideanState& s) {
  const Jet a = h1_jet(s);
  const Jet b = h2_tilde_jet(s);
  Jet j;
  j.value = a.value * a.value - b.value;
  for (int k = 0; k < 6; ++k) j.grad[k] = 2.0 * a.value * a.grad[k] - b.grad[k];
  return j;
}

Jet c3_jet(const EuclideanState& s) {
  Jet j;
  j.value = s.m.dot(s.n);
  j.grad = {s.n(0), s.n(1), s.n(2), s.m(0), s.m(1), s.m(2)};
  return j;
}

Jet c4_jet(const EuclideanState& s) {
  Jet j;
  j.value = s.n.squaredNorm();
  j.grad = {0.0, 0.0, 0.0, 2 * s.n(0), 2 * s.n(1), 2 * s.n(2)};
  return j;
}

Observable m(int i) {
  const int k = checked_index(i);
  return [k](const EuclideanState& s) { return coordinate(s, k); };
}

Observable n(int i) {
  const int k = checked_index(i) + 3;
  return [k](const EuclideanState& s) { return coordinate(s, k); };
}

Observable hamiltonian() {
  return [](const EuclideanState& s) {
    Jet j = h1_jet(s);
    j.value *= 0.5;
    for (auto& g : j.grad) g *= 0.5;
    return j;
  };
}

Observable h1() { return h1_jet; }
Observable h2_tilde() { return h2_tilde_jet; }
Observable h2() { return h2_jet; }
Observable c3() { return c3_jet; }
Observable c4() { return c4_jet; }

}  // namespace observables

StateSampler::StateSampler(std::uint64_t seed, double amplitude,
                           double min_abs_m2)
    : engine_(seed), amplitude_(amplitude), min_abs_m2_(min_abs_m2) {
  if (!(amplitude > 0) || !(min_abs_m2 >= 0) || min_abs_m2 >= amplitude)
    throw std::invalid_argument("StateSampler: bad amplitude/threshold");
}

double StateSampler::uniform(double lo, double hi) {
  // 53 random mantissa bits; std::uniform_real_distribution is not
  // reproducible across standard libraries.
  const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

EuclideanState StateSampler::next() {
  for (;;) {
    EuclideanState s;
    for (int k = 0; k < 3; ++k) s.m(k) = uniform(-amplitude_, amplitude_);
    for (int k = 0; k < 3; ++k) s.n(k) = uniform(-amplitude_, amplitude_);
    if (std::abs(s.m(1)) >= min_abs_m2_) return s;
  }
}

}  // namespace kovtop
