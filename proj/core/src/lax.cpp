#include "kovtop/lax.hpp"

#include <Eigen/LU>

#include "kovtop/errors.hpp"

namespace kovtop {

namespace {

Mat3 hat(const Vec3& v) {
  Mat3 h;
  h << 0, v(2), -v(1), -v(2), 0, v(0), v(1), -v(0), 0;
  return h;
}

template <class M>
M commutator(const M& a, const M& b) {
  return a * b - b * a;
}

}  // namespace

LaxPair3 build_l2_m2(const EuclideanState& s) {
  const Mat3 A = Vec3(1, 1, 0).asDiagonal();
  const Vec3 gamma(1, 0, 0);
  const Mat3 mh = hat(s.m);
  LaxPair3 p;
  p.L2 = -A *
         (2 * mh * mh + gamma * s.n.transpose() + s.n * gamma.transpose()) *
         A;
  p.M2 = -A * mh * A;
  return p;
}

double det_l2_block(const Mat3& L2) {
  return L2(0, 0) * L2(1, 1) - L2(0, 1) * L2(1, 0);
}

Complex spectral_poly_l2(const EuclideanState& state, Complex s) {
  const Eigen::Matrix3cd m =
      s * Eigen::Matrix3cd::Identity() - build_l2_m2(state).L2.cast<Complex>();
  return m.determinant();
}

std::array<double, 2> isospectral_coefficients(const EuclideanState& state) {
  const double nodes[4] = {-1.0, 0.0, 1.0, 2.0};
  Eigen::Matrix4d V;
  Eigen::Vector4d rhs;
  for (int i = 0; i < 4; ++i) {
    double p = 1;
    for (int k = 0; k < 4; ++k) {
      V(i, k) = p;
      p *= nodes[i];
    }
    rhs(i) = spectral_poly_l2(state, nodes[i]).real();
  }
  const Eigen::Vector4d c = V.partialPivLu().solve(rhs);
  // c = (0, h2, -2 h1, 1) in ascending order.
  return {c(2), c(1)};
}

SmallLax build_small_lax(const FgCoords& fg, const IntegralSet& in,
                         double tol) {
  const double unit = fg.unit_residual();
  const double orth = fg.orthogonality_residual();
  if (!(std::abs(unit) <= tol) || !(std::abs(orth) <= tol))
    throw ConstraintViolation("(f, g) off the constraint surface: " +
                              std::to_string(unit) + ", " +
                              std::to_string(orth));
  const double f1 = fg.f(0), f2 = fg.f(1), f3 = fg.f(2);
  const double g1 = fg.g(0), g2 = fg.g(1), g3 = fg.g(2);
  const double h1 = in.h1, c3 = in.c3;
  SmallLax x;
  x.L << f2, f1, -f3, -f2;
  x.M << -g2, g1, -g3, g2;
  x.M *= 0.25;
  const double d = c3 * f1 + 2 * h1 * f2;
  x.N << d, f3 + h1 * f1, in.gamma4 * f1 + 2 * c3 * f2 - h1 * f3, -d;
  x.N *= -0.125;
  return x;
}

double lax_residual(const Trajectory& traj, LaxKind which, double t) {
  const std::size_t i = traj.interior_index(t);
  const EuclideanState& s = traj.state(i);
  switch (which) {
    case LaxKind::three_by_three: {
      const Mat3 dL = time_derivative(traj, i, [](const EuclideanState& x) {
        return build_l2_m2(x).L2;
      });
      const LaxPair3 p = build_l2_m2(s);
      return (dL - commutator(p.L2, p.M2)).cwiseAbs().maxCoeff();
    }
    case LaxKind::small_f:
    case LaxKind::small_g: {
      const IntegralSet& in = traj.reference_integrals();
      const SmallLax x = build_small_lax(to_fg(s), in);
      if (which == LaxKind::small_f) {
        const Mat2 dL = time_derivative(traj, i, [](const EuclideanState& y) {
          const Vec3 f = to_fg(y).f;
          Mat2 L;
          L << f(1), f(0), -f(2), -f(1);
          return L;
        });
        return (dL - commutator(x.L, x.M)).cwiseAbs().maxCoeff();
      }
      const Mat2 dM = time_derivative(traj, i, [](const EuclideanState& y) {
        const Vec3 g = to_fg(y).g;
        Mat2 M;
        M << -g(1), g(0), -g(2), g(1);
        return Mat2(0.25 * M);
      });
      return (dM - commutator(x.L, x.N)).cwiseAbs().maxCoeff();
    }
  }
  throw ConfigError("unknown Lax kind");
}

const char* to_string(LaxKind which) {
  switch (which) {
    case LaxKind::three_by_three:
      return "three_by_three";
    case LaxKind::small_f:
      return "small_f";
    case LaxKind::small_g:
      return "small_g";
  }
  return "?";
}

}  // namespace kovtop
