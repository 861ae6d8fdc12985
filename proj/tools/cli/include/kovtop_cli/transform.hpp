#pragma once

// Derived quantities along a trajectory, one row per sample: the chart
// (f, g), the separation variables, the Weierstrass variables (x, y) and the
// Abel-map image u.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "kovtop/rigid_dynamics.hpp"
#include "kovtop_cli/trajectory_io.hpp"

namespace kovtop::cli {

// Bits of the flag column; 0 means the row is complete.
enum TransformFlag : std::uint32_t {
  kFlagChart = 1,        // |m2| below the chart threshold; f, g and later NaN
  kFlagCollision = 2,    // s1 = s2
  kFlagNoRoots = 4,      // a_j = 0 or P3 has a double root; x, y NaN
  kFlagNoAbel = 8,       // outside every Abel segment; u NaN
  kFlagBridged = 16,     // near a branch point; u from the bridged quadrature
};

struct TransformTable {
  std::vector<std::string> columns;  // t, f1, ..., Re_u2, Im_u2, flag
  std::vector<std::vector<double>> rows;  // without the flag column
  std::vector<std::uint32_t> flags;
  std::size_t chart_failures = 0;
};

// Throws NumericalFailure when the chart fails on more than half of the
// samples.
TransformTable transform(const Trajectory& traj);

void write_transform_csv(std::ostream& os, const TransformTable& table);
Json transform_json(const TransformTable& table);

}  // namespace kovtop::cli
