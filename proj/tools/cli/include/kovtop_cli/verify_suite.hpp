#pragma once

// The verification suite behind `kovtop verify`: every check is tagged with
// the equations it exercises and the acceptance criterion it belongs to.
//
// Data sources, all derived from one seed:
//   seed      five conservation trajectories (StateSampler, t_end from cfg)
//   seed + 1  100 point states for the pointwise identities
//   seed + 2  three members of the reference family for stencil checks
//   seed + 3  spectral-parameter points
//   seed + 4  theta-function sample points and period matrices
//   seed + 5  the synthetic Clebsch trajectory
// An input trajectory replaces the conservation and reference-family
// trajectories.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kovtop/rigid_dynamics.hpp"
#include "kovtop_cli/trajectory_io.hpp"

namespace kovtop::cli {

enum class Comparison { less, equal_zero, at_least };

struct CheckResult {
  std::string tag;
  int criterion = 0;
  std::string description;
  double value = 0;
  double threshold = 0;
  Comparison comparison = Comparison::less;
  bool pass = false;
  std::size_t samples = 0;
  std::size_t excluded_chart = 0;
  std::size_t excluded_collision = 0;
  std::size_t excluded_other = 0;
  std::string note;
};

struct VerificationReport {
  std::uint64_t seed = 0;
  std::string source;  // "seeded" or the input path
  std::vector<CheckResult> checks;

  bool all_pass() const;
};

struct SuiteOptions {
  std::uint64_t seed = 1;
  TrajectoryConfig conservation;  // t_end, tolerances and sample_dt
  std::vector<std::string> only;  // tag prefixes
  double corrupt_h1 = 0;
  std::optional<Trajectory> input;
  std::string input_name;
};

struct CheckInfo {
  std::string tag;
  int criterion = 0;
  std::string description;
};

// Every check in report order.
const std::vector<CheckInfo>& check_catalog();

// Throws ConfigError when an --only prefix matches no check.
VerificationReport run_suite(const SuiteOptions& opt);

Json report_json(const VerificationReport& report);
VerificationReport report_from_json(const Json& j);
std::string report_table(const VerificationReport& report);

const char* to_string(Comparison c);

}  // namespace kovtop::cli
