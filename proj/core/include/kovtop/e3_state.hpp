#pragma once

// Phase space e(3)* of the Kovalevskaya top: the state (m, n), the Lie-Poisson
// bracket, the Hamiltonian and its integrals. Units are J = 1 with the weight
// constant absorbed into n.

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace kovtop {

using Complex = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;
using Vec6 = Eigen::Matrix<double, 6, 1>;

// Plain bilinear cross product. Eigen's cross() conjugates the result for
// complex scalars, which is not the product the brackets need.
template <class V>
V cross3(const V& a, const V& b) {
  V c;
  c << a(1) * b(2) - a(2) * b(1), a(2) * b(0) - a(0) * b(2),
      a(0) * b(1) - a(1) * b(0);
  return c;
}

struct EuclideanState {
  Vec3 m = Vec3::Zero();  // angular momentum
  Vec3 n = Vec3::Zero();  // centre-of-mass vector in the body frame

  EuclideanState() = default;
  EuclideanState(const Vec3& m_in, const Vec3& n_in) : m(m_in), n(n_in) {}

  static EuclideanState from_vector(const Vec6& v);
  Vec6 to_vector() const;
  bool finite() const;
};

struct IntegralSet {
  double h1 = 0;      // 2H
  double k2 = 0;      // xi_+ xi_-
  double c3 = 0;      // (m, n)
  double c4 = 0;      // |n|^2
  double h2 = 0;      // h1^2 - k2
  double gamma4 = 0;  // c4 - k2

  // Fills the derived members from the four independent constants.
  static IntegralSet from_constants(double h1, double k2, double c3, double c4);
};

IntegralSet integrals(const EuclideanState& state);

// Value plus gradient with respect to (m1, m2, m3, n1, n2, n3).
struct Jet {
  Complex value{};
  std::array<Complex, 6> grad{};
};

using Observable = std::function<Jet(const EuclideanState&)>;

// Lie-Poisson bracket of e(3), extended bilinearly to complex gradients:
//   {F,G} = m . (dF/dm x dG/dm) + n . (dF/dm x dG/dn + dF/dn x dG/dm).
// The (m, n) arguments may be complex so the same engine serves the Clebsch
// system with (l, p) in their place.
Complex lie_poisson(const std::array<Complex, 6>& grad_f,
                    const std::array<Complex, 6>& grad_g, const CVec3& m,
                    const CVec3& n);

Complex poisson_bracket(const Jet& f, const Jet& g, const EuclideanState& state);
Complex poisson_bracket(const Observable& f, const Observable& g,
                        const EuclideanState& state);

// (p, q, r) = (m1, m2, 2 m3).
Vec3 angular_velocity(const EuclideanState& state);

namespace observables {

Observable m(int i);  // i in {0,1,2}
Observable n(int i);
Observable hamiltonian();  // H
Observable h1();           // H1 = 2H
Observable h2_tilde();     // xi_+ xi_-
Observable h2();           // H1^2 - xi_+ xi_-
Observable c3();
Observable c4();

// Plain gradients of the integrals, shared with the chart observables.
Jet h1_jet(const EuclideanState& s);
Jet h2_tilde_jet(const EuclideanState& s);
Jet h2_jet(const EuclideanState& s);
Jet c3_jet(const EuclideanState& s);
Jet c4_jet(const EuclideanState& s);

}  // namespace observables

// Reproducible state generator. Components are uniform in
// [-amplitude, amplitude]; states with |m2| below `min_abs_m2` are rejected so
// that samples stay away from the singular line of the (f, g) chart.
class StateSampler {
 public:
  explicit StateSampler(std::uint64_t seed, double amplitude = 2.0,
                        double min_abs_m2 = 0.1);

  EuclideanState next();
  double uniform(double lo, double hi);

 private:
  std::mt19937_64 engine_;
  double amplitude_;
  double min_abs_m2_;
};

}  // namespace kovtop
