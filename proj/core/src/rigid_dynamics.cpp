#include "kovtop/rigid_dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace kovtop {

Vec6 eom(const EuclideanState& s) {
  const auto& m = s.m;
  const auto& n = s.n;
  Vec6 d;
  d << m(1) * m(2), -(2 * m(2) * m(0) + n(2)) / 2, n(1) / 2,
      2 * m(2) * n(1) - m(1) * n(2), m(0) * n(2) - 2 * m(2) * n(0),
      m(1) * n(0) - m(0) * n(1);
  return d;
}

void TrajectoryConfig::validate() const {
  Dopri5Options o{t_end, rtol, atol, sample_dt, max_steps};
  kovtop::validate(o);
}

Trajectory::Trajectory(std::vector<double> times,
                       std::vector<EuclideanState> states, double sample_dt,
                       IntegratorStats stats)
    : times_(std::move(times)),
      states_(std::move(states)),
      sample_dt_(sample_dt),
      stats_(stats) {
  if (times_.size() != states_.size())
    throw ConfigError("trajectory: times and states differ in length");
  if (times_.empty()) throw ConfigError("trajectory: no samples");
  if (!(sample_dt_ > 0)) throw ConfigError("trajectory: sample_dt must be > 0");
  for (std::size_t i = 1; i < times_.size(); ++i) {
    const double gap = times_[i] - times_[i - 1];
    if (!(gap > 0) || std::abs(gap - sample_dt_) > 1e-6 * sample_dt_)
      throw ConfigError("trajectory: times must be uniformly spaced");
  }
  reference_ = integrals(states_.front());
}

std::size_t Trajectory::index_of(double t) const {
  const double q = (t - times_.front()) / sample_dt_;
  const double r = std::round(q);
  if (std::abs(q - r) > 1e-6 || r < 0 || r >= static_cast<double>(size()))
    throw OutOfRange("time " + std::to_string(t) + " is not a sample time");
  return static_cast<std::size_t>(r);
}

std::size_t Trajectory::interior_index(double t) const {
  const std::size_t i = index_of(t);
  if (!interior(i))
    throw OutOfRange("time " + std::to_string(t) +
                     " is outside the differentiable range");
  return i;
}

EuclideanState Trajectory::state_at(double t) const {
  const double t0 = times_.front();
  if (t < t0 || t > times_.back())
    throw OutOfRange("time " + std::to_string(t) + " outside the trajectory");
  if (size() == 1) return states_.front();
  std::size_t i = static_cast<std::size_t>((t - t0) / sample_dt_);
  i = std::min(i, size() - 2);
  const double h = times_[i + 1] - times_[i];
  const double u = (t - times_[i]) / h;
  const Vec6 y0 = states_[i].to_vector(), y1 = states_[i + 1].to_vector();
  const Vec6 d0 = eom(states_[i]), d1 = eom(states_[i + 1]);
  const double u2 = u * u, u3 = u2 * u;
  const Vec6 y = (2 * u3 - 3 * u2 + 1) * y0 + (u3 - 2 * u2 + u) * h * d0 +
                 (-2 * u3 + 3 * u2) * y1 + (u3 - u2) * h * d1;
  return EuclideanState::from_vector(y);
}

Trajectory Trajectory::thinned(std::size_t stride) const {
  if (stride == 0) throw ConfigError("thinning stride must be positive");
  std::vector<double> t;
  std::vector<EuclideanState> s;
  for (std::size_t i = 0; i < size(); i += stride) {
    t.push_back(times_[i]);
    s.push_back(states_[i]);
  }
  return Trajectory(std::move(t), std::move(s),
                    sample_dt_ * static_cast<double>(stride), stats_);
}

Trajectory integrate(const EuclideanState& state0, const TrajectoryConfig& cfg) {
  cfg.validate();
  if (!state0.finite()) throw ConfigError("initial state is not finite");
  const Dopri5Options opt{cfg.t_end, cfg.rtol, cfg.atol, cfg.sample_dt,
                          cfg.max_steps};
  auto rhs = [](const Vec6& y) { return eom(EuclideanState::from_vector(y)); };
  auto samples = dopri5_sample<6>(rhs, state0.to_vector(), opt);

  std::vector<EuclideanState> states;
  states.reserve(samples.values.size());
  for (const auto& v : samples.values)
    states.push_back(EuclideanState::from_vector(v));
  return Trajectory(std::move(samples.times), std::move(states), cfg.sample_dt,
                    samples.stats);
}

double DriftReport::max() const {
  return *std::max_element(max_relative.begin(), max_relative.end());
}

DriftReport integral_drift(const Trajectory& traj) {
  const IntegralSet& ref = traj.reference_integrals();
  const std::array<double, 4> base{ref.h1, ref.k2, ref.c3, ref.c4};
  DriftReport out;
  for (const auto& s : traj.states()) {
    const IntegralSet cur = integrals(s);
    const std::array<double, 4> v{cur.h1, cur.k2, cur.c3, cur.c4};
    for (int k = 0; k < 4; ++k) {
      const double rel =
          std::abs(v[k] - base[k]) / std::max(1.0, std::abs(base[k]));
      out.max_relative[k] = std::max(out.max_relative[k], rel);
    }
  }
  return out;
}

}  // namespace kovtop
