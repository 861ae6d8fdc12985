#include "kovtop_cli/run_config.hpp"

#include <charconv>

#include "kovtop/errors.hpp"

namespace kovtop::cli {

std::uint64_t RunConfig::effective_seed() const {
  return seed.value_or(kDefaultSeed);
}

EuclideanState RunConfig::initial_state() const {
  if (state) return *state;
  StateSampler sampler(effective_seed());
  return sampler.next();
}

void resolve_seed(RunConfig& cfg, const char* env_seed) {
  if (cfg.seed && cfg.state)
    throw ConfigError("--seed and --state are mutually exclusive");
  if (!cfg.seed && !cfg.state && env_seed != nullptr && *env_seed != '\0')
    cfg.seed = parse_seed(env_seed);
}

std::uint64_t parse_seed(std::string_view text) {
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty())
    throw ConfigError("invalid seed '" + std::string(text) + "'");
  return v;
}

Format parse_format(std::string_view text) {
  if (text == "csv") return Format::csv;
  if (text == "json") return Format::json;
  throw ConfigError("unknown format '" + std::string(text) +
                    "' (expected csv or json)");
}

const char* to_string(Format f) { return f == Format::csv ? "csv" : "json"; }

EuclideanState parse_state(std::span<const double> v) {
  if (v.size() != 6)
    throw ConfigError("--state needs six values m1,m2,m3,n1,n2,n3");
  EuclideanState s(Vec3(v[0], v[1], v[2]), Vec3(v[3], v[4], v[5]));
  if (!s.finite()) throw ConfigError("--state has non-finite values");
  return s;
}

}  // namespace kovtop::cli
