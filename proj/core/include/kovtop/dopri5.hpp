#pragma once

// Dormand-Prince 5(4) with proportional-integral step control and the
// 4th-order continuous extension, sampling the solution on a uniform grid.
// Templated on the dimension so both the top (6 reals) and the complexified
// Clebsch system (12 reals) share one implementation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "kovtop/errors.hpp"

namespace kovtop {

struct Dopri5Options {
  double t_end = 100.0;
  double rtol = 1e-10;
  double atol = 1e-12;
  double sample_dt = 0.01;
  long max_steps = 10'000'000;
};

struct IntegratorStats {
  long steps = 0;       // accepted steps
  long rejections = 0;  // rejected trial steps
  long rhs_evals = 0;
};

template <int N>
struct Dopri5Samples {
  std::vector<double> times;
  std::vector<Eigen::Matrix<double, N, 1>> values;
  IntegratorStats stats;
};

// Number of grid intervals in [0, t_end] for spacing dt, tolerating the
// rounding of t_end/dt (e.g. 100/0.01).
inline std::size_t grid_intervals(double t_end, double dt) {
  const double q = t_end / dt;
  const double r = std::round(q);
  return static_cast<std::size_t>(std::abs(q - r) < 1e-9 * std::max(1.0, q)
                                      ? r
                                      : std::floor(q));
}

inline void validate(const Dopri5Options& o) {
  if (!(o.rtol > 0) || !(o.atol > 0))
    throw ConfigError("rtol and atol must be positive");
  if (!(o.sample_dt > 0)) throw ConfigError("sample_dt must be positive");
  if (!(o.t_end > 0)) throw ConfigError("t_end must be positive");
  if (o.max_steps <= 0) throw ConfigError("max_steps must be positive");
  if (o.sample_dt > o.t_end) throw ConfigError("sample_dt exceeds t_end");
}

namespace detail {

// Butcher tableau of the Dormand-Prince pair (FSAL).
struct Dp5Tableau {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5,
                          c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113,
                          b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                          b6 = 11.0 / 84;
  // b - b_hat (embedded 4th-order weights).
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695,
                          e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;
  // Continuous extension: y(t + th h) = y + h sum_i k_i sum_r P[i][r] th^(r+1).
  static constexpr double P[7][4] = {
      {1.0, -8048581381.0 / 2820520608, 8663915743.0 / 2820520608,
       -12715105075.0 / 11282082432},
      {0.0, 0.0, 0.0, 0.0},
      {0.0, 131558114200.0 / 32700410799, -68118460800.0 / 10900136933,
       87487479700.0 / 32700410799},
      {0.0, -1754552775.0 / 470086768, 14199869525.0 / 1410260304,
       -10690763975.0 / 1880347072},
      {0.0, 127303824393.0 / 49829197408, -318862633887.0 / 49829197408,
       701980252875.0 / 199316789632},
      {0.0, -282668133.0 / 205662961, 2019193451.0 / 616988883,
       -1453857185.0 / 822651844},
      {0.0, 40617522.0 / 29380423, -110615467.0 / 29380423,
       69997945.0 / 29380423}};
};

}  // namespace detail

// Integrates y' = rhs(y) from t = 0 and returns samples at k * sample_dt.
template <int N, class Rhs>
Dopri5Samples<N> dopri5_sample(Rhs&& rhs, const Eigen::Matrix<double, N, 1>& y0,
                               const Dopri5Options& opt) {
  using V = Eigen::Matrix<double, N, 1>;
  using T = detail::Dp5Tableau;
  validate(opt);
  if (!y0.allFinite()) throw ConfigError("initial state is not finite");

  constexpr double kSafety = 0.9, kFacMin = 0.2, kFacMax = 5.0;
  constexpr double kBeta = 0.04, kAlpha = 0.2 - 0.75 * kBeta;

  const std::size_t intervals = grid_intervals(opt.t_end, opt.sample_dt);
  const double t_final = static_cast<double>(intervals) * opt.sample_dt;

  Dopri5Samples<N> out;
  out.times.reserve(intervals + 1);
  out.values.reserve(intervals + 1);
  out.times.push_back(0.0);
  out.values.push_back(y0);
  std::size_t next_sample = 1;

  auto scale = [&](const V& a, const V& b) {
    return (opt.atol + opt.rtol * a.cwiseAbs().cwiseMax(b.cwiseAbs()).array())
        .matrix();
  };

  V y = y0;
  V k1 = rhs(y);
  ++out.stats.rhs_evals;
  double t = 0.0;

  // Starting step from the ratio of the state and rate scales.
  const V sc0 = scale(y, y);
  const double d0 = (y.array() / sc0.array()).abs().maxCoeff();
  const double d1 = (k1.array() / sc0.array()).abs().maxCoeff();
  double h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h = std::min(h, opt.sample_dt);
  double err_old = 1e-4;
  bool last_rejected = false;

  V k2, k3, k4, k5, k6, k7, y_new, err_vec;
  while (next_sample <= intervals) {
    if (out.stats.steps + out.stats.rejections >= opt.max_steps)
      throw IntegrationError("step count exceeded", t);
    const double min_h = 1e-14 * std::max(1.0, std::abs(t));
    if (h < min_h) throw IntegrationError("step size underflow", t);
    h = std::min(h, t_final - t);

    k2 = rhs((y + h * (T::a21 * k1)).eval());
    k3 = rhs((y + h * (T::a31 * k1 + T::a32 * k2)).eval());
    k4 = rhs((y + h * (T::a41 * k1 + T::a42 * k2 + T::a43 * k3)).eval());
    k5 = rhs((y + h * (T::a51 * k1 + T::a52 * k2 + T::a53 * k3 +
                       T::a54 * k4))
                 .eval());
    k6 = rhs((y + h * (T::a61 * k1 + T::a62 * k2 + T::a63 * k3 +
                       T::a64 * k4 + T::a65 * k5))
                 .eval());
    y_new = y + h * (T::b1 * k1 + T::b3 * k3 + T::b4 * k4 + T::b5 * k5 +
                     T::b6 * k6);
    k7 = rhs(y_new);
    out.stats.rhs_evals += 6;

    err_vec = h * (T::e1 * k1 + T::e3 * k3 + T::e4 * k4 + T::e5 * k5 +
                   T::e6 * k6 + T::e7 * k7);
    const double err =
        (err_vec.array() / scale(y, y_new).array()).abs().maxCoeff();
    if (!std::isfinite(err)) {
      ++out.stats.rejections;
      h *= kFacMin;
      last_rejected = true;
      continue;
    }

    if (err <= 1.0) {
      // Emit every grid point covered by [t, t + h].
      const double t_new = t + h;
      while (next_sample <= intervals) {
        const double ts = static_cast<double>(next_sample) * opt.sample_dt;
        if (ts > t_new + 1e-12 * std::max(1.0, t_new)) break;
        const double th = std::clamp((ts - t) / h, 0.0, 1.0);
        const double p[4] = {th, th * th, th * th * th, th * th * th * th};
        const V* ks[7] = {&k1, &k2, &k3, &k4, &k5, &k6, &k7};
        V acc = V::Zero(y.rows());
        for (int i = 0; i < 7; ++i) {
          const double w = T::P[i][0] * p[0] + T::P[i][1] * p[1] +
                           T::P[i][2] * p[2] + T::P[i][3] * p[3];
          if (w != 0.0) acc += w * *ks[i];
        }
        out.times.push_back(ts);
        out.values.push_back(y + h * acc);
        ++next_sample;
      }
      t = t_new;
      y = y_new;
      k1 = k7;
      ++out.stats.steps;

      double fac = err > 0 ? kSafety * std::pow(err, -kAlpha) *
                                 std::pow(err_old, kBeta)
                           : kFacMax;
      fac = std::clamp(fac, kFacMin, kFacMax);
      if (last_rejected) fac = std::min(fac, 1.0);
      err_old = std::max(err, 1e-4);
      h *= fac;
      last_rejected = false;
    } else {
      ++out.stats.rejections;
      h *= std::max(kFacMin, kSafety * std::pow(err, -0.2));
      last_rejected = true;
    }
  }
  return out;
}

}  // namespace kovtop
