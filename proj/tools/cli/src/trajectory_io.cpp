#include "kovtop_cli/trajectory_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "kovtop/errors.hpp"

namespace kovtop::cli {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw NumericalFailure("format_double failed");
  return std::string(buf.data(), ptr);
}

double parse_double(std::string_view text) {
  if (text == "nan") return std::nan("");
  if (text == "inf") return HUGE_VAL;
  if (text == "-inf") return -HUGE_VAL;
  double v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty())
    throw ConfigError("invalid number '" + std::string(text) + "'");
  return v;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << kTrajectoryHeader << '\n';
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto& s = traj.state(i);
    os << format_double(traj.time(i));
    for (int k = 0; k < 3; ++k) os << ',' << format_double(s.m(k));
    for (int k = 0; k < 3; ++k) os << ',' << format_double(s.n(k));
    os << '\n';
  }
}

namespace {

Trajectory from_rows(const std::vector<std::array<double, 7>>& rows) {
  if (rows.empty()) throw ConfigError("trajectory has no samples");
  std::vector<double> t;
  std::vector<EuclideanState> s;
  t.reserve(rows.size());
  s.reserve(rows.size());
  for (const auto& r : rows) {
    t.push_back(r[0]);
    s.emplace_back(Vec3(r[1], r[2], r[3]), Vec3(r[4], r[5], r[6]));
    if (!s.back().finite() || !std::isfinite(r[0]))
      throw ConfigError("trajectory has non-finite values");
  }
  const double dt = t.size() > 1 ? t[1] - t[0] : 1.0;
  return Trajectory(std::move(t), std::move(s), dt);
}

}  // namespace

Trajectory read_trajectory_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("empty trajectory file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTrajectoryHeader)
    throw ConfigError("unexpected trajectory header '" + line + "'");
  std::vector<std::array<double, 7>> rows;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::array<double, 7> r{};
    std::size_t field = 0, start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      const std::string_view cell =
          std::string_view(line).substr(start, comma == std::string::npos
                                                   ? std::string::npos
                                                   : comma - start);
      if (field >= r.size())
        throw ConfigError("line " + std::to_string(lineno) +
                          ": too many fields");
      r[field++] = parse_double(cell);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (field != r.size())
      throw ConfigError("line " + std::to_string(lineno) + ": expected 7 fields");
    rows.push_back(r);
  }
  return from_rows(rows);
}

namespace {

Json integrals_json(const IntegralSet& in) {
  return Json{{"h1", in.h1}, {"k2", in.k2},         {"c3", in.c3},
              {"c4", in.c4}, {"h2", in.h2}, {"gamma4", in.gamma4}};
}

}  // namespace

Json sidecar_json(const Trajectory& traj, const RunInfo& info) {
  Json j;
  if (info.seed)
    j["seed"] = *info.seed;
  else
    j["seed"] = nullptr;
  const auto& s0 = traj.state(0);
  j["initial_state"] = {{"m", {s0.m(0), s0.m(1), s0.m(2)}},
                        {"n", {s0.n(0), s0.n(1), s0.n(2)}}};
  j["config"] = {{"t_end", info.config.t_end},
                 {"rtol", info.config.rtol},
                 {"atol", info.config.atol},
                 {"sample_dt", info.config.sample_dt}};
  j["integrals"] = integrals_json(traj.reference_integrals());
  const DriftReport d = integral_drift(traj);
  j["drift"] = {{"h1", d.max_relative[0]},
                {"k2", d.max_relative[1]},
                {"c3", d.max_relative[2]},
                {"c4", d.max_relative[3]},
                {"max", d.max()}};
  j["integrator"] = {{"steps", traj.stats().steps},
                     {"rejections", traj.stats().rejections},
                     {"rhs_evals", traj.stats().rhs_evals}};
  j["samples_count"] = traj.size();
  return j;
}

Json trajectory_json(const Trajectory& traj, const RunInfo& info) {
  Json j = sidecar_json(traj, info);
  Json rows = Json::array();
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto& s = traj.state(i);
    rows.push_back({traj.time(i), s.m(0), s.m(1), s.m(2), s.n(0), s.n(1),
                    s.n(2)});
  }
  j["samples"] = std::move(rows);
  return j;
}

Trajectory read_trajectory_json(const Json& j) {
  if (!j.is_object() || !j.contains("samples") || !j["samples"].is_array())
    throw ConfigError("trajectory JSON lacks a samples array");
  std::vector<std::array<double, 7>> rows;
  for (const auto& r : j["samples"]) {
    if (!r.is_array() || r.size() != 7)
      throw ConfigError("trajectory JSON rows need 7 numbers");
    std::array<double, 7> row{};
    for (std::size_t k = 0; k < 7; ++k) {
      if (!r[k].is_number()) throw ConfigError("trajectory JSON: not a number");
      row[k] = r[k].get<double>();
    }
    rows.push_back(row);
  }
  return from_rows(rows);
}

Trajectory load_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  if (path.extension() == ".json") {
    Json j;
    try {
      j = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(path.string() + ": " + e.what());
    }
    return read_trajectory_json(j);
  }
  return read_trajectory_csv(in);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void write_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
  if (!out) throw ConfigError("write failed for " + path.string());
}

}  // namespace kovtop::cli
