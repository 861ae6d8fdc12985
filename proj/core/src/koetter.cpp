#include "kovtop/koetter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "kovtop/errors.hpp"

namespace kovtop {

namespace {

constexpr int kCyc[3][2] = {{1, 2}, {2, 0}, {0, 1}};  // (k, l) for each j
const Complex kI(0.0, 1.0);

// Coefficients (c0, c1, c2) of the quadratic through (a_j, v_j).
std::array<Complex, 3> lagrange_quadratic(const std::array<Complex, 3>& a,
                                          const std::array<Complex, 3>& dp3,
                                          const std::array<Complex, 3>& v) {
  std::array<Complex, 3> c{};
  for (int j = 0; j < 3; ++j) {
    const Complex ak = a[kCyc[j][0]], al = a[kCyc[j][1]];
    const Complex w = v[j] / dp3[j];
    c[2] += w;
    c[1] -= w * (ak + al);
    c[0] += w * ak * al;
  }
  return c;
}

Vec3 to_real(const CVec3& z, double tol, const char* what) {
  for (int i = 0; i < 3; ++i)
    if (std::abs(z(i).imag()) > tol * (1 + std::abs(z(i))))
      throw NumericalFailure(std::string(what) +
                             ": imaginary residue " +
                             std::to_string(std::abs(z(i).imag())) +
                             " (branch inconsistency)");
  return z.real();
}

// Values of the quadratic s^2 v1 - (v3 + h1 v1) s + sign 2 c3 v2 at a_j,
// divided by i sqrt(2 a_j).
CVec3 node_values(const Vec3& v, double sign, const RootBranches& br) {
  CVec3 out;
  for (int j = 0; j < 3; ++j) {
    const Complex a = br.a[j];
    const Complex q =
        v(0) * a * a - (v(2) + br.h1 * v(0)) * a + sign * 2 * br.c3 * v(1);
    out(j) = q / (kI * br.sqrt_2a[j]);
  }
  return out;
}

// Inverse of node_values: the quadratic through i sqrt(2 a_j) z_j.
CVec3 node_inverse(const CVec3& z, double sign, const RootBranches& br) {
  std::array<Complex, 3> v{};
  for (int j = 0; j < 3; ++j) v[j] = kI * br.sqrt_2a[j] * z(j);
  const auto c = lagrange_quadratic(br.a, br.dp3, v);
  CVec3 out;
  out(0) = c[2];
  out(2) = -c[1] - br.h1 * c[2];
  out(1) = sign * c[0] / (2 * br.c3);
  return out;
}

}  // namespace

RealPoly p2_poly(const IntegralSet& in) { return RealPoly({in.h2, -2 * in.h1, 1.0}); }

RealPoly p3_poly(const IntegralSet& in) {
  return RealPoly({0.0, 1.0}) * p2_poly(in) + RealPoly({-2 * in.c3 * in.c3, in.c4});
}

RealPoly p5_expanded(const IntegralSet& in) {
  const RealPoly cubic({-2 * in.c3 * in.c3, in.c4 + in.h2, -2 * in.h1, 1.0});
  return cubic * p2_poly(in);
}

KovPolynomials build_polynomials(const IntegralSet& in, const FgCoords& fg) {
  const double f1 = fg.f(0), f2 = fg.f(1), f3 = fg.f(2);
  KovPolynomials k;
  k.p2 = p2_poly(in);
  k.p3 = p3_poly(in);
  k.p5 = k.p3 * k.p2;
  k.q1 = RealPoly({-2 * f2 * f2, f1 * f1});
  k.q2 = RealPoly({-2 * in.c3 * f2, -(f3 + in.h1 * f1), f1});
  const auto roots = polynomial_roots(k.p3);
  std::copy(roots.begin(), roots.end(), k.a.begin());
  return k;
}

RealPoly spectral_f_poly(const SpectralVars& sv) {
  return RealPoly({sv.S2, -sv.S1, 1.0});
}

Complex koetter_residual(const KovPolynomials& k, const SpectralVars& sv,
                         Complex s) {
  const Complex q2 = k.q2(s);
  return -2.0 * s * sv.F(s) - q2 * q2 + k.p3(s) * k.q1(s);
}

RealPoly koetter_coefficient_residual(const KovPolynomials& k,
                                      const SpectralVars& sv) {
  return (-2.0) * (RealPoly({0.0, 1.0}) * spectral_f_poly(sv)) - k.q2 * k.q2 +
         k.p3 * k.q1;
}

RootBranches RootBranches::permuted(const std::array<int, 3>& perm) const {
  RootBranches b = *this;
  for (int j = 0; j < 3; ++j) {
    b.a[j] = a[perm[j]];
    b.sqrt_2a[j] = sqrt_2a[perm[j]];
    b.dp3[j] = dp3[perm[j]];
    b.rho[j] = rho[perm[j]];
  }
  const int inversions = (perm[0] > perm[1]) + (perm[0] > perm[2]) +
                         (perm[1] > perm[2]);
  if (inversions % 2 == 1) b.zeta = -zeta;
  return b;
}

RootBranches root_branches(const IntegralSet& in) {
  const RealPoly p3 = p3_poly(in);
  const auto roots = polynomial_roots(p3);
  const double scale = std::max(1.0, p3.max_abs());
  RootBranches b;
  b.h1 = in.h1;
  b.c3 = in.c3;
  for (int j = 0; j < 3; ++j) b.a[j] = roots[static_cast<std::size_t>(j)];
  for (int j = 0; j < 3; ++j)
    if (std::abs(b.a[j]) <= kZeroRootTol * scale)
      throw SingularSystem("P3 has the root a = 0 (c3 = 0); sqrt(2 a_j) "
                           "division undefined");
  const RealPoly dp = p3.derivative();
  for (int j = 0; j < 3; ++j) {
    b.sqrt_2a[j] = std::sqrt(2.0 * b.a[j]);
    b.dp3[j] = dp(b.a[j]);
    if (std::abs(b.dp3[j]) <= 1e-10 * scale)
      throw RootCollision("P3 has a repeated root");
    b.rho[j] = std::sqrt(b.dp3[j]);
  }
  const Complex prod_sq = b.sqrt_2a[0] * b.sqrt_2a[1] * b.sqrt_2a[2];
  b.eta = prod_sq / (4.0 * in.c3);
  const Complex vdm =
      (b.a[0] - b.a[1]) * (b.a[1] - b.a[2]) * (b.a[2] - b.a[0]);
  b.zeta = -kI * prod_sq * b.rho[0] * b.rho[1] * b.rho[2] / (4.0 * in.c3 * vdm);
  return b;
}

CVec3 x_from_fg(const FgCoords& fg, const RootBranches& br) {
  return node_values(fg.f, -1.0, br);
}

CVec3 big_y_from_fg(const FgCoords& fg, const RootBranches& br) {
  return node_values(fg.g, 1.0, br);
}

CVec3 y_from_fg(const FgCoords& fg, const RootBranches& br) {
  return (br.eta / std::sqrt(2.0)) * big_y_from_fg(fg, br);
}

CVec3 y_difference_quotient(const CVec3& x, Complex s1, Complex s2,
                            Complex s1_dot, Complex s2_dot,
                            const RootBranches& br) {
  const double r2 = std::sqrt(2.0);
  const Complex w1 = -kI * (s1 - s2) * s1_dot / r2;
  const Complex w2 = -kI * (s2 - s1) * s2_dot / r2;
  CVec3 y;
  for (int j = 0; j < 3; ++j) {
    const int k = kCyc[j][0], l = kCyc[j][1];
    const Complex ak = br.a[k], al = br.a[l];
    y(j) = x(k) * x(l) / (s1 - s2) *
           (w1 / ((s1 - ak) * (s1 - al)) - w2 / ((s2 - ak) * (s2 - al)));
  }
  return y;
}

Vec3 from_x(const CVec3& x, const RootBranches& br, double tol) {
  return to_real(node_inverse(x, -1.0, br), tol, "from_x");
}

Vec3 from_y(const CVec3& y, const RootBranches& br, double tol) {
  const CVec3 big_y = (std::sqrt(2.0) * br.eta) * y;
  return to_real(node_inverse(big_y, 1.0, br), tol, "from_y");
}

std::size_t count_branch_jumps(const std::vector<std::size_t>& index,
                               const std::vector<CVec3>& v, double factor) {
  std::size_t jumps = 0;
  for (std::size_t i = 1; i + 2 < v.size(); ++i) {
    if (index[i - 1] + 1 != index[i] || index[i] + 1 != index[i + 1] ||
        index[i + 1] + 1 != index[i + 2])
      continue;
    for (int c = 0; c < 3; ++c) {
      const double before = std::abs(v[i](c) - v[i - 1](c));
      const double here = std::abs(v[i + 1](c) - v[i](c));
      const double after = std::abs(v[i + 2](c) - v[i + 1](c));
      const double floor = 1e-9 * (1 + std::abs(v[i](c)));
      if (here > factor * std::max(before, after) + floor) {
        ++jumps;
        break;
      }
    }
  }
  return jumps;
}

XySeries to_xy(const Trajectory& traj, const XyOptions& opt) {
  const IntegralSet& in = traj.reference_integrals();
  XySeries out;
  out.branches = root_branches(in);
  const RootBranches& br = out.branches;

  auto roots = [&in](const EuclideanState& s) {
    const SpectralVars sv = s_forms(to_fg(s), in);
    return Eigen::Vector2cd(sv.s1, sv.s2);
  };

  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (!traj.interior(i)) continue;
    if (window_min_abs_m2(traj, i) < std::max(opt.min_window_abs_m2,
                                               kChartThreshold)) {
      ++out.excluded_chart;
      continue;
    }
    const FgCoords fg = to_fg(traj.state(i));
    const SpectralVars sv = s_forms(fg, in);
    if (sv.double_root) {
      ++out.excluded_collision;
      continue;
    }
    XySample smp;
    smp.index = i;
    smp.t = traj.time(i);
    smp.s1 = sv.s1;
    smp.s2 = sv.s2;
    const Eigen::Vector2cd sd = time_derivative(traj, i, roots);
    smp.s1_dot = sd(0);
    smp.s2_dot = sd(1);
    smp.x = x_from_fg(fg, br);
    smp.y = y_from_fg(fg, br);
    smp.y48 = y_difference_quotient(smp.x, sv.s1, sv.s2, sd(0), sd(1), br);

    const KovPolynomials kp = build_polynomials(in, fg);
    for (int j = 0; j < 3; ++j) {
      const Complex a = br.a[j];
      out.max_eq47 = std::max(
          out.max_eq47,
          std::abs(smp.x(j) * smp.x(j) - (sv.s1 - a) * (sv.s2 - a)));
      out.max_eq55 = std::max(
          out.max_eq55, std::abs(kp.q2(a) - kI * br.sqrt_2a[j] * smp.x(j)));
    }
    double node_gap = std::numeric_limits<double>::infinity();
    for (const Complex a : br.a)
      node_gap = std::min({node_gap, std::abs(sv.s1 - a), std::abs(sv.s2 - a)});
    smp.y48_checked = node_gap >= opt.node_tol;
    if (smp.y48_checked)
      out.max_y_mismatch = std::max(out.max_y_mismatch,
                                    (smp.y48 - smp.y).cwiseAbs().maxCoeff());
    else
      ++out.y48_unchecked;
    out.samples.push_back(smp);
  }

  std::vector<std::size_t> idx;
  std::vector<CVec3> xs, ys;
  for (const auto& s : out.samples) {
    idx.push_back(s.index);
    xs.push_back(s.x);
    ys.push_back(s.y48);
  }
  out.branch_jumps = count_branch_jumps(idx, xs) + count_branch_jumps(idx, ys);
  return out;
}

}  // namespace kovtop
