#pragma once

// Serialization of trajectories: CSV with the shortest text that reads back
// exactly, a JSON sidecar with constants, drift and integrator statistics,
// and readers for both formats.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "kovtop/rigid_dynamics.hpp"

namespace kovtop::cli {

using Json = nlohmann::ordered_json;

inline constexpr const char* kTrajectoryHeader = "t,m1,m2,m3,n1,n2,n3";

// Shortest text that reads back as the same double, never more than 17
// significant digits; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double v);
// Throws ConfigError on malformed input.
double parse_double(std::string_view text);

void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
// Throws ConfigError on a wrong header, ragged rows, bad numbers or
// non-uniform times.
Trajectory read_trajectory_csv(std::istream& is);

struct RunInfo {
  std::optional<std::uint64_t> seed;  // absent for an explicit state
  TrajectoryConfig config;
};

Json sidecar_json(const Trajectory& traj, const RunInfo& info);
// Sidecar plus a "samples" array of [t, m1, m2, m3, n1, n2, n3] rows.
Json trajectory_json(const Trajectory& traj, const RunInfo& info);
Trajectory read_trajectory_json(const Json& j);

// Dispatches on the extension (.csv or .json).
Trajectory load_trajectory(const std::filesystem::path& path);

// Two-space indentation and a trailing newline.
std::string dump(const Json& j);

// Writes text to path; throws ConfigError when the file cannot be written.
void write_file(const std::filesystem::path& path, std::string_view text);

}  // namespace kovtop::cli
