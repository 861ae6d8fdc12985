#include "kovtop/reference.hpp"

#include "kovtop/errors.hpp"
#include "kovtop/kov_vars.hpp"

namespace kovtop::reference {

TrajectoryConfig config(double sample_dt, double t_end) {
  TrajectoryConfig c;
  c.t_end = t_end;
  c.rtol = kRtol;
  c.atol = kAtol;
  c.sample_dt = sample_dt;
  return c;
}

std::size_t usable_samples(const Trajectory& traj, double min_abs_m2) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < traj.size(); ++i)
    if (traj.interior(i) && window_min_abs_m2(traj, i) >= min_abs_m2) ++n;
  return n;
}

std::vector<EuclideanState> family_states(std::uint64_t seed,
                                          std::size_t count) {
  StateSampler sampler(seed, kAmplitude);
  std::vector<EuclideanState> out;
  for (int tries = 0; out.size() < count; ++tries) {
    if (tries > 1000)
      throw NumericalFailure("reference family: no usable trajectories");
    const EuclideanState s = sampler.next();
    if (usable_samples(integrate(s, config(kChartSampleDt))) >=
        kMinUsableSamples)
      out.push_back(s);
  }
  return out;
}

}  // namespace kovtop::reference
