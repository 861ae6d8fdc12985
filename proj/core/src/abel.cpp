#include "kovtop/abel.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "kovtop/errors.hpp"
#include "kovtop/koetter.hpp"

namespace kovtop {

namespace {

const Complex kI(0.0, 1.0);

double dot_eom(const Jet& j, const Vec6& rate) {
  double acc = 0;
  for (int k = 0; k < 6; ++k) acc += j.grad[k].real() * rate(k);
  return acc;
}

// Lagrange extrapolation of (t_k, w_k) to t.
Complex extrapolate(const std::vector<double>& ts,
                    const std::vector<Complex>& ws, double t) {
  Complex acc{};
  for (std::size_t a = 0; a < ts.size(); ++a) {
    Complex basis = 1.0;
    for (std::size_t b = 0; b < ts.size(); ++b)
      if (b != a) basis *= (t - ts[b]) / (ts[a] - ts[b]);
    acc += basis * ws[a];
  }
  return acc;
}

}  // namespace

SDot sdot_bracket(const EuclideanState& s) {
  const Vec6 rate = eom(s);
  return {dot_eom(observables::S1()(s), rate),
          dot_eom(observables::S2()(s), rate)};
}

SDot sdot_stencil(const Trajectory& traj, std::size_t i) {
  const IntegralSet& in = traj.reference_integrals();
  const Eigen::Vector2d d =
      time_derivative(traj, i, [&in](const EuclideanState& s) {
        const SpectralVars sv = s_forms(to_fg(s), in);
        return Eigen::Vector2d(sv.S1, sv.S2);
      });
  return {d(0), d(1)};
}

WeierstrassTriple build_fgh(const SpectralVars& sv, const SDot& sd,
                            const IntegralSet& in) {
  const double S1 = sv.S1, S2 = sv.S2, h1 = in.h1, h2 = in.h2, c3 = in.c3,
               c4 = in.c4;
  WeierstrassTriple w;
  w.b1 = -S1 + 4 * h1;
  w.b2 = S1 * S1 - S2 - 4 * h1 * S1 + 2 * h2 + 4 * h1 * h1 + c4;
  w.b3 = -S1 * S1 * S1 + 4 * h1 * S1 * S1 + 2 * S1 * S2 - 4 * h1 * S2 -
         (2 * h2 + 4 * h1 * h1 + c4) * S1 - 0.5 * sd.S1 * sd.S1 +
         4 * h1 * h2 + 2 * h1 * c4 + 2 * c3 * c3;
  w.F = RealPoly({S2, -S1, 1.0});
  w.G = RealPoly({-sd.S2, sd.S1});
  w.H = RealPoly({-2 * w.b3, 2 * w.b2, -2 * w.b1, 2.0});
  return w;
}

RealPoly eq60_residual(const WeierstrassTriple& w, const IntegralSet& in) {
  return w.F * w.H - w.G * w.G - 2.0 * p5_expanded(in);
}

double eq60_relative_residual(const WeierstrassTriple& w,
                              const IntegralSet& in) {
  // Scale by the size of the terms that cancel, |F| |H| + |G| |G|
  // coefficientwise, and by 2 |P5|.
  auto abs_poly = [](const RealPoly& p) {
    std::vector<double> c = p.coeffs();
    for (double& x : c) x = std::abs(x);
    return RealPoly(std::move(c));
  };
  const RealPoly terms =
      abs_poly(w.F) * abs_poly(w.H) + abs_poly(w.G) * abs_poly(w.G);
  const double scale = std::max(
      {1.0, terms.max_abs(), (2.0 * p5_expanded(in)).max_abs()});
  return eq60_residual(w, in).max_abs() / scale;
}

Complex abel_jacobi_rate(Complex s_self, Complex s_other, Complex sqrt_2p5) {
  return kI * sqrt_2p5 / (s_self - s_other);
}

AbelJacobiStream abel_jacobi_stream(const Trajectory& traj,
                                    const AbelOptions& opt) {
  const IntegralSet& in = traj.reference_integrals();
  const RealPoly p5x2 = 2.0 * p5_expanded(in);
  auto roots = [&in](const EuclideanState& s) {
    const SpectralVars sv = s_forms(to_fg(s), in);
    return Eigen::Vector2cd(sv.s1, sv.s2);
  };

  AbelJacobiStream out;
  out.sample_dt = traj.sample_dt();
  out.max_bridge = opt.max_bridge;
  bool have_last = false;
  std::size_t last_index = 0;
  std::array<std::vector<double>, 2> hist_t;
  std::array<std::vector<Complex>, 2> hist_w;

  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (!traj.interior(i)) continue;
    if (window_min_abs_m2(traj, i) <
        std::max(opt.min_window_abs_m2, kChartThreshold)) {
      ++out.excluded_chart;
      continue;
    }
    const SpectralVars sv = s_forms(to_fg(traj.state(i)), in);
    if (sv.double_root) {
      ++out.excluded_collision;
      out.collision_times.push_back(traj.time(i));
      continue;
    }
    const bool new_segment =
        !have_last || i - last_index - 1 > opt.max_bridge;
    if (new_segment) {
      if (have_last) ++out.segments;
      for (int k = 0; k < 2; ++k) {
        hist_t[k].clear();
        hist_w[k].clear();
      }
    }
    have_last = true;
    last_index = i;

    AbelSample smp;
    smp.index = i;
    smp.t = traj.time(i);
    smp.segment = out.segments;
    smp.s = {sv.s1, sv.s2};
    const Eigen::Vector2cd sd = time_derivative(traj, i, roots);
    smp.s_dot = {sd(0), sd(1)};
    const Complex gap = sv.s1 - sv.s2;
    bool any_reference = false;
    for (int k = 0; k < 2; ++k) {
      const Complex other = smp.s[1 - k];
      const Complex dyn = -kI * (smp.s[k] - other) * smp.s_dot[k];
      if (hist_w[k].empty()) {
        smp.w[k] = dyn;
        any_reference = true;
      } else {
        const Complex q = std::sqrt(p5x2(smp.s[k]));
        const std::size_t n = hist_w[k].size();
        const std::size_t take = std::min<std::size_t>(3, n);
        const std::vector<double> ts(hist_t[k].end() - take, hist_t[k].end());
        const std::vector<Complex> ws(hist_w[k].end() - take, hist_w[k].end());
        const Complex pred = extrapolate(ts, ws, smp.t);
        smp.w[k] = std::abs(q - pred) <= std::abs(q + pred) ? q : -q;
      }
      if (std::abs(smp.w[k]) < opt.branch_point_tol * std::abs(gap))
        smp.near_branch = true;
      smp.r[k] = smp.s_dot[k] - abel_jacobi_rate(smp.s[k], other, smp.w[k]);
    }
    smp.reference = any_reference;
    if (smp.near_branch) {
      ++out.near_branch;
    } else {
      for (int k = 0; k < 2; ++k) {
        hist_t[k].push_back(smp.t);
        hist_w[k].push_back(smp.w[k]);
      }
    }
    out.samples.push_back(smp);
  }
  if (have_last) ++out.segments;
  return out;
}

std::pair<Complex, Complex> AbelJacobiStream::residual_at(double t) const {
  for (double c : collision_times)
    if (std::abs(c - t) <= 1e-6 * sample_dt)
      throw RootCollision("s1 = s2 at t = " + std::to_string(t));
  for (const auto& s : samples)
    if (std::abs(s.t - t) <= 1e-6 * sample_dt) return {s.r[0], s.r[1]};
  throw OutOfRange("t = " + std::to_string(t) + " is not a usable sample");
}

double AbelJacobiStream::max_residual() const {
  double m = 0;
  for (const auto& s : samples)
    if (!s.reference && !s.near_branch)
      m = std::max({m, std::abs(s.r[0]), std::abs(s.r[1])});
  return m;
}

std::size_t AbelJacobiStream::checked() const {
  return static_cast<std::size_t>(
      std::count_if(samples.begin(), samples.end(), [](const AbelSample& s) {
        return !s.reference && !s.near_branch;
      }));
}

std::pair<Complex, Complex> abel_jacobi_residual(const AbelJacobiStream& s,
                                                 double t) {
  return s.residual_at(t);
}

namespace {

void finish_segment(AbelSegment& seg, AbelIncrements& out) {
  if (seg.t.empty()) return;
  const double n = static_cast<double>(seg.t.size());
  double tm = 0;
  Complex um{};
  for (std::size_t k = 0; k < seg.t.size(); ++k) {
    tm += seg.t[k] / n;
    um += seg.u[k][1] / n;
    seg.u1_drift =
        std::max(seg.u1_drift, std::abs(seg.u[k][0] - seg.u[0][0]));
  }
  double stt = 0;
  Complex stu{};
  for (std::size_t k = 0; k < seg.t.size(); ++k) {
    stt += (seg.t[k] - tm) * (seg.t[k] - tm);
    stu += (seg.t[k] - tm) * (seg.u[k][1] - um);
  }
  seg.slope_u2 = stt > 0 ? stu / stt : Complex{};
  out.segments.push_back(std::move(seg));
  seg = AbelSegment{};
}

}  // namespace

AbelIncrements abel_increments(const AbelJacobiStream& stream) {
  AbelIncrements out;
  const double dt = stream.sample_dt;
  using Phi = std::array<Complex, 2>;

  // Good samples (usable integrand), grouped by stream segment.
  struct Node {
    std::size_t index;
    double t;
    std::size_t segment;
    Phi phi;
  };
  std::vector<Node> nodes;
  for (const auto& s : stream.samples) {
    if (s.near_branch) continue;
    Phi phi{};
    for (int k = 0; k < 2; ++k) {
      const Complex ds = s.s_dot[k] / s.w[k];
      phi[0] += ds;
      phi[1] += s.s[k] * ds;
    }
    nodes.push_back({s.index, s.t, s.segment, phi});
  }

  AbelSegment seg;
  Phi u{};
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const Node& nd = nodes[k];
    const bool start =
        k == 0 || nd.segment != nodes[k - 1].segment ||
        nd.index - nodes[k - 1].index - 1 > stream.max_bridge;
    if (start) {
      // Stream segments only split at gaps longer than max_bridge.
      if (k > 0) ++out.rejected_gaps;
      finish_segment(seg, out);
      u = Phi{};
      seg.index.push_back(nd.index);
      seg.t.push_back(nd.t);
      seg.u.push_back(u);
      continue;
    }
    // Trapezoid over each grid interval, the integrand interpolated linearly
    // across bridged samples.
    const Node& pv = nodes[k - 1];
    const std::size_t steps = nd.index - pv.index;
    seg.bridged += steps - 1;
    for (int c = 0; c < 2; ++c)
      u[c] += 0.5 * dt * static_cast<double>(steps) * (pv.phi[c] + nd.phi[c]);
    seg.index.push_back(nd.index);
    seg.t.push_back(nd.t);
    seg.u.push_back(u);
  }
  finish_segment(seg, out);
  return out;
}

AbelIncrements abel_increments(const Trajectory& traj, const AbelOptions& opt) {
  return abel_increments(abel_jacobi_stream(traj, opt));
}

double AbelIncrements::max_u1_drift(std::size_t min_samples) const {
  double m = 0;
  for (const auto& s : segments)
    if (s.t.size() >= min_samples) m = std::max(m, s.u1_drift);
  return m;
}

double AbelIncrements::max_slope_error(std::size_t min_samples) const {
  double m = 0;
  for (const auto& s : segments)
    if (s.t.size() >= min_samples)
      m = std::max(m, std::abs(s.slope_u2 - kI));
  return m;
}

SpectralLax spectral_lax(const WeierstrassTriple& w, double T1, Complex s) {
  const Complex F = w.F(s), G = w.G(s), H = w.H(s);
  if (std::abs(F) < kPoleTol)
    throw RootCollision("spectral_lax: F(s) = 0, s is a pole of M");
  SpectralLax x;
  x.L << G, F, -H, -G;
  const Complex C = (s - 2 * T1) * F - 0.5 * H;
  const Complex D = -G;
  x.M << 0, 0, C / F, D / F;
  x.det = F * H - G * G;
  return x;
}

double spectral_lax_residual(const Trajectory& traj, std::size_t i,
                             Complex s) {
  const IntegralSet& in = traj.reference_integrals();
  auto lax_at = [&in, s](const EuclideanState& st) {
    const SpectralVars sv = s_forms(to_fg(st), in);
    return spectral_lax(build_fgh(sv, sdot_bracket(st), in), sv.T1, s);
  };
  const CMat2 dL = time_derivative(
      traj, i, [&](const EuclideanState& st) { return lax_at(st).L; });
  const SpectralLax c = lax_at(traj.state(i));
  return (dL - (c.L * c.M - c.M * c.L)).cwiseAbs().maxCoeff();
}

std::vector<Complex> spectral_points(std::uint64_t seed, std::size_t count,
                                     std::span<const Complex> avoid,
                                     double radius) {
  std::mt19937_64 eng(seed);
  auto unit = [&eng] {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
  };
  std::vector<Complex> pts;
  std::size_t attempts = 0;
  while (pts.size() < count) {
    if (++attempts > 1000 * (count + 1))
      throw NumericalFailure("spectral_points: exclusion disks cover the box");
    const Complex z(-3 + 6 * unit(), -3 + 6 * unit());
    const bool clear = std::all_of(avoid.begin(), avoid.end(), [&](Complex a) {
      return std::abs(z - a) >= radius;
    });
    if (clear) pts.push_back(z);
  }
  return pts;
}

}  // namespace kovtop
