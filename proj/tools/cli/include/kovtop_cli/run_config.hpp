#pragma once

// Run configuration shared by every subcommand, and the parsing of the
// values that CLI11 hands over as strings.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kovtop/e3_state.hpp"
#include "kovtop/rigid_dynamics.hpp"

namespace kovtop::cli {

enum class Format { csv, json };

inline constexpr std::uint64_t kDefaultSeed = 1;
inline constexpr const char* kSeedEnv = "KOVTOP_SEED";

struct RunConfig {
  std::optional<std::uint64_t> seed;
  std::optional<EuclideanState> state;
  TrajectoryConfig traj;
  std::vector<std::string> only;    // check-tag prefixes; empty runs all
  std::filesystem::path out_dir;    // empty writes to standard output
  Format format = Format::csv;
  std::optional<std::filesystem::path> input;
  double corrupt_h1 = 0;  // test hook: added to h1 wherever checks take it

  // Seed actually used: the explicit seed, else kDefaultSeed.
  std::uint64_t effective_seed() const;
  // The explicit state, else the first draw of StateSampler(seed).
  EuclideanState initial_state() const;
};

// Resolves the seed source after parsing: --state and --seed are mutually
// exclusive; with neither, `env_seed` (the KOVTOP_SEED value, may be null)
// supplies the seed. Throws ConfigError.
void resolve_seed(RunConfig& cfg, const char* env_seed);

std::uint64_t parse_seed(std::string_view text);
Format parse_format(std::string_view text);
const char* to_string(Format f);
// Six values m1, m2, m3, n1, n2, n3.
EuclideanState parse_state(std::span<const double> values);

}  // namespace kovtop::cli
