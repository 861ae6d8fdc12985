#pragma once

// The seeded trajectory family used by every finite-difference residual
// check. Components are drawn from [-1, 1] and integrated tightly so that the
// stencil truncation error, not the integrator, sets the residual floor.
// Chart-based checks use only samples whose stencil window keeps
// |m2| >= kChartWindowMinAbsM2.

#include <cstdint>
#include <vector>

#include "kovtop/rigid_dynamics.hpp"

namespace kovtop::reference {

inline constexpr double kAmplitude = 1.0;
inline constexpr double kRtol = 1e-13;
inline constexpr double kAtol = 1e-14;
inline constexpr double kTEnd = 20.0;
inline constexpr double kLaxSampleDt = 0.01;
inline constexpr double kChartSampleDt = 0.001;
inline constexpr double kChartWindowMinAbsM2 = 0.5;
// A trajectory joins the family only with this many chart-usable samples.
inline constexpr std::size_t kMinUsableSamples = 1000;

TrajectoryConfig config(double sample_dt, double t_end = kTEnd);

// Number of interior samples whose stencil window satisfies the chart bound.
std::size_t usable_samples(const Trajectory& traj,
                           double min_abs_m2 = kChartWindowMinAbsM2);

// Initial states of the first `count` family members for `seed`: draws from
// StateSampler(seed, kAmplitude), keeping states whose chart trajectory has
// at least kMinUsableSamples usable samples.
std::vector<EuclideanState> family_states(std::uint64_t seed,
                                          std::size_t count);

}  // namespace kovtop::reference
