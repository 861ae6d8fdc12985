#include "kovtop/clebsch.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "kovtop/errors.hpp"

namespace kovtop {

namespace {

using Vec12 = Eigen::Matrix<double, 12, 1>;

Vec12 pack(const CVec3& l, const CVec3& p) {
  Vec12 v;
  for (int i = 0; i < 3; ++i) {
    v(2 * i) = l(i).real();
    v(2 * i + 1) = l(i).imag();
    v(6 + 2 * i) = p(i).real();
    v(6 + 2 * i + 1) = p(i).imag();
  }
  return v;
}

void unpack(const Vec12& v, CVec3& l, CVec3& p) {
  for (int i = 0; i < 3; ++i) {
    l(i) = Complex(v(2 * i), v(2 * i + 1));
    p(i) = Complex(v(6 + 2 * i), v(6 + 2 * i + 1));
  }
}

}  // namespace

Complex ClebschState::hamiltonian() const {
  return 0.5 * (Complex(l.transpose() * l) + Complex(p.transpose() * B * p));
}

ClebschRates clebsch_eom(const ClebschState& st) {
  const CVec3 bp = st.B * st.p;
  std::array<Complex, 6> grad_h{};
  for (int i = 0; i < 3; ++i) {
    grad_h[i] = st.l(i);
    grad_h[3 + i] = bp(i);
  }
  ClebschRates r;
  for (int i = 0; i < 6; ++i) {
    std::array<Complex, 6> e{};
    e[i] = 1.0;
    const Complex v = lie_poisson(grad_h, e, st.l, st.p);
    if (i < 3)
      r.dl(i) = v;
    else
      r.dp(i - 3) = v;
  }
  return r;
}

ClebschRates clebsch_eom_explicit(const ClebschState& st) {
  ClebschRates r;
  r.dl = cross3<CVec3>(st.p, st.B * st.p);
  r.dp = cross3(st.p, st.l);
  return r;
}

ClebschTrajectory integrate_clebsch(const ClebschState& st0,
                                    const Dopri5Options& opt) {
  const CMat3 B = st0.B;
  auto rhs = [&B](const Vec12& v) {
    ClebschState s;
    s.B = B;
    unpack(v, s.l, s.p);
    const ClebschRates r = clebsch_eom_explicit(s);
    return pack(r.dl, r.dp);
  };
  auto samples = dopri5_sample<12>(rhs, pack(st0.l, st0.p), opt);
  ClebschTrajectory out;
  out.times = std::move(samples.times);
  out.stats = samples.stats;
  out.sample_dt = opt.sample_dt;
  out.states.reserve(samples.values.size());
  for (const auto& v : samples.values) {
    ClebschState s;
    s.B = B;
    unpack(v, s.l, s.p);
    out.states.push_back(s);
  }
  return out;
}

ClebschSeries ClebschSeries::window(double t0, double t1) const {
  ClebschSeries w;
  for (std::size_t i = 0; i < size(); ++i) {
    if (t[i] < t0 || t[i] > t1) continue;
    w.t.push_back(t[i]);
    w.l.push_back(l[i]);
    w.p.push_back(p[i]);
    w.dl.push_back(dl[i]);
    w.dp.push_back(dp[i]);
  }
  return w;
}

ClebschSeries ClebschSeries::slice(std::size_t begin, std::size_t end) const {
  ClebschSeries w;
  end = std::min(end, size());
  for (std::size_t i = begin; i < end; ++i) {
    w.t.push_back(t[i]);
    w.l.push_back(l[i]);
    w.p.push_back(p[i]);
    w.dl.push_back(dl[i]);
    w.dp.push_back(dp[i]);
  }
  return w;
}

namespace {

void record(ClebschSeries& s, double t, const CVec3& l, const CVec3& p,
            const CVec3& dl, const CVec3& dp) {
  s.t.push_back(t);
  s.l.push_back(l);
  s.p.push_back(p);
  s.dl.push_back(dl);
  s.dp.push_back(dp);
  s.max_lp = std::max(s.max_lp, std::abs(Complex(l.transpose() * p)));
  s.max_unit_p =
      std::max(s.max_unit_p, std::abs(Complex(p.transpose() * p) - 1.0));
}

}  // namespace

ClebschSeries series_from(const ClebschTrajectory& traj) {
  ClebschSeries s;
  const std::size_t n = traj.states.size();
  const double h = traj.sample_dt;
  for (std::size_t i = 2; i + 2 < n; ++i) {
    const auto& st = traj.states;
    const CVec3 dl = stencil::first_derivative<CVec3>(
        st[i - 2].l, st[i - 1].l, st[i + 1].l, st[i + 2].l, h);
    const CVec3 dp = stencil::first_derivative<CVec3>(
        st[i - 2].p, st[i - 1].p, st[i + 1].p, st[i + 2].p, h);
    record(s, traj.times[i], st[i].l, st[i].p, dl, dp);
  }
  return s;
}

ClebschState clebsch_image(const FgCoords& fg, const RootBranches& br) {
  const CVec3 x = x_from_fg(fg, br);
  const CVec3 big_y = big_y_from_fg(fg, br);
  ClebschState st;
  for (int j = 0; j < 3; ++j) {
    st.p(j) = x(j) / br.rho[j];
    st.l(j) = -(br.zeta / 2.0) * big_y(j) / br.rho[j];
  }
  st.B = CMat3::Zero();
  return st;
}

ClebschSeries map_kovalevskaya(const Trajectory& traj,
                               double min_window_abs_m2) {
  const RootBranches br = root_branches(traj.reference_integrals());
  using CVec6 = Eigen::Matrix<Complex, 6, 1>;
  auto image = [&br](const EuclideanState& s) {
    const ClebschState c = clebsch_image(to_fg(s), br);
    CVec6 v;
    v << c.l, c.p;
    return v;
  };
  ClebschSeries out;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (!traj.interior(i)) continue;
    if (window_min_abs_m2(traj, i) <
        std::max(min_window_abs_m2, kChartThreshold)) {
      ++out.excluded;
      continue;
    }
    const CVec6 v = image(traj.state(i));
    const CVec6 d = time_derivative(traj, i, image);
    record(out, traj.time(i), v.head<3>(), v.tail<3>(), d.head<3>(),
           d.tail<3>());
  }
  return out;
}

ClebschSeries scale_p(const ClebschSeries& s, Complex c) {
  ClebschSeries o = s;
  for (std::size_t i = 0; i < o.size(); ++i) {
    o.p[i] *= c;
    o.dp[i] *= c;
  }
  return o;
}

CVec3 trace_free(const CVec3& b) {
  const Complex mean = b.sum() / 3.0;
  return b - CVec3::Constant(mean);
}

ClebschFit fit_diagonal_b(const ClebschSeries& s) {
  const std::size_t n = s.size();
  if (n < kMinFitSamples)
    throw ConfigError("fit_diagonal_b: need at least " +
                      std::to_string(kMinFitSamples) + " samples, got " +
                      std::to_string(n));
  // Trace-free parametrisation B = (b1, b2, -b1 - b2):
  //   l1' = p2 p3 (B3 - B2) = p2 p3 (-b1 - 2 b2)
  //   l2' = p3 p1 (B1 - B3) = p3 p1 (2 b1 + b2)
  //   l3' = p1 p2 (B2 - B1) = p1 p2 (b2 - b1)
  Eigen::MatrixXcd A(3 * n, 2);
  Eigen::VectorXcd rhs(3 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const CVec3& p = s.p[i];
    const auto r = static_cast<Eigen::Index>(3 * i);
    A(r, 0) = -p(1) * p(2);
    A(r, 1) = -2.0 * p(1) * p(2);
    A(r + 1, 0) = 2.0 * p(2) * p(0);
    A(r + 1, 1) = p(2) * p(0);
    A(r + 2, 0) = -p(0) * p(1);
    A(r + 2, 1) = p(0) * p(1);
    rhs.segment<3>(r) = s.dl[i];
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeThinU |
                                                Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (!(sv(1) > 1e-10 * sv(0)))
    throw SingularSystem("fit_diagonal_b: rank-deficient design (degenerate "
                         "trajectory)");
  const Eigen::Vector2cd b = svd.solve(rhs);
  ClebschFit fit;
  fit.B << b(0), b(1), -b(0) - b(1);
  fit.samples = n;
  fit.condition = sv(0) / sv(1);
  for (std::size_t i = 0; i < n; ++i) {
    const CVec3 bp = fit.B.cwiseProduct(s.p[i]);
    fit.ldot_residual = std::max(
        fit.ldot_residual, (s.dl[i] - cross3(s.p[i], bp)).cwiseAbs().maxCoeff());
    fit.pdot_residual = std::max(
        fit.pdot_residual,
        (s.dp[i] - cross3(s.p[i], s.l[i])).cwiseAbs().maxCoeff());
  }
  return fit;
}

}  // namespace kovtop
