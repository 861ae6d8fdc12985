#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "kovtop/dopri5.hpp"
#include "kovtop/e3_state.hpp"
#include "kovtop/stencil.hpp"

namespace kovtop {

// Right-hand side of the equations of motion:
//   m1' = m2 m3,  2 m2' = -(2 m3 m1 + n3),  2 m3' = n2,
//   n1' = 2 m3 n2 - m2 n3,  n2' = m1 n3 - 2 m3 n1,  n3' = m2 n1 - m1 n2.
Vec6 eom(const EuclideanState& state);

struct TrajectoryConfig {
  double t_end = 100.0;
  double rtol = 1e-10;
  double atol = 1e-12;
  double sample_dt = 0.01;
  long max_steps = 10'000'000;

  void validate() const;
};

class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(std::vector<double> times, std::vector<EuclideanState> states,
             double sample_dt, IntegratorStats stats = {});

  std::size_t size() const { return states_.size(); }
  double time(std::size_t i) const { return times_[i]; }
  const EuclideanState& state(std::size_t i) const { return states_[i]; }
  const std::vector<double>& times() const { return times_; }
  const std::vector<EuclideanState>& states() const { return states_; }
  double sample_dt() const { return sample_dt_; }
  const IntegratorStats& stats() const { return stats_; }

  // Integrals of the first sample; the constants every derived quantity of
  // this trajectory is built with.
  const IntegralSet& reference_integrals() const { return reference_; }

  // Sample index of grid time t; throws OutOfRange if t is off the grid.
  std::size_t index_of(double t) const;
  // Whether the 5-point stencil centred at i fits inside the samples.
  bool interior(std::size_t i) const {
    return i >= stencil::kHalfWidth && i + stencil::kHalfWidth < size();
  }
  std::size_t interior_index(double t) const;

  // Cubic Hermite interpolation using eom() slopes at the bracketing samples.
  EuclideanState state_at(double t) const;

  // Every stride-th sample (spacing stride * sample_dt).
  Trajectory thinned(std::size_t stride) const;

 private:
  std::vector<double> times_;
  std::vector<EuclideanState> states_;
  double sample_dt_ = 0.0;
  IntegratorStats stats_;
  IntegralSet reference_;
};

// Raises IntegrationError (step count exceeded, step size underflow) with the
// time of failure.
Trajectory integrate(const EuclideanState& state0, const TrajectoryConfig& cfg);

struct DriftReport {
  // max_t |I(t) - I(0)| / max(1, |I(0)|) for I = h1, k2, c3, c4.
  std::array<double, 4> max_relative{};
  double max() const;
};

DriftReport integral_drift(const Trajectory& traj);

// Five-point derivative d/dt of q(state) at interior sample i. `Q` may return
// any type closed under addition and scaling by double (scalars, complex,
// Eigen matrices).
template <class Quantity>
auto time_derivative(const Trajectory& traj, std::size_t i, Quantity&& q) {
  if (!traj.interior(i)) throw OutOfRange("sample is not interior");
  using T = std::decay_t<decltype(q(traj.state(i)))>;
  const T fm2 = q(traj.state(i - 2)), fm1 = q(traj.state(i - 1));
  const T fp1 = q(traj.state(i + 1)), fp2 = q(traj.state(i + 2));
  return stencil::first_derivative<T>(fm2, fm1, fp1, fp2, traj.sample_dt());
}

template <class Quantity>
auto second_time_derivative(const Trajectory& traj, std::size_t i,
                            Quantity&& q) {
  if (!traj.interior(i)) throw OutOfRange("sample is not interior");
  using T = std::decay_t<decltype(q(traj.state(i)))>;
  const T fm2 = q(traj.state(i - 2)), fm1 = q(traj.state(i - 1));
  const T f0 = q(traj.state(i));
  const T fp1 = q(traj.state(i + 1)), fp2 = q(traj.state(i + 2));
  return stencil::second_derivative<T>(fm2, fm1, f0, fp1, fp2,
                                       traj.sample_dt());
}

}  // namespace kovtop
