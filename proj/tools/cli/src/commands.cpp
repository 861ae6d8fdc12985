#include "kovtop_cli/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "kovtop/errors.hpp"
#include "kovtop_cli/trajectory_io.hpp"
#include "kovtop_cli/transform.hpp"
#include "kovtop_cli/verify_suite.hpp"

namespace kovtop::cli {

namespace fs = std::filesystem;

namespace {

fs::path output_dir(const RunConfig& cfg) {
  const fs::path dir = cfg.out_dir.empty() ? fs::path(".") : cfg.out_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create " + dir.string() + ": " + ec.message());
  return dir;
}

RunInfo run_info(const RunConfig& cfg) {
  RunInfo info;
  if (!cfg.state) info.seed = cfg.effective_seed();
  info.config = cfg.traj;
  return info;
}

Trajectory source_trajectory(const RunConfig& cfg) {
  if (cfg.input) return load_trajectory(*cfg.input);
  return integrate(cfg.initial_state(), cfg.traj);
}

}  // namespace

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  const Trajectory traj = integrate(cfg.initial_state(), cfg.traj);
  const RunInfo info = run_info(cfg);
  const fs::path dir = output_dir(cfg);
  if (cfg.format == Format::csv) {
    std::ostringstream csv;
    write_trajectory_csv(csv, traj);
    write_file(dir / "trajectory.csv", csv.str());
    write_file(dir / "trajectory.meta.json", dump(sidecar_json(traj, info)));
    out << "wrote " << (dir / "trajectory.csv").string() << " and "
        << (dir / "trajectory.meta.json").string();
  } else {
    write_file(dir / "trajectory.json", dump(trajectory_json(traj, info)));
    out << "wrote " << (dir / "trajectory.json").string();
  }
  out << " (" << traj.size() << " samples, max relative drift "
      << format_double(integral_drift(traj).max()) << ")\n";
  return kExitOk;
}

int cmd_transform(const RunConfig& cfg, std::ostream& out) {
  const TransformTable table = transform(source_trajectory(cfg));
  const fs::path dir = output_dir(cfg);
  fs::path file;
  if (cfg.format == Format::csv) {
    std::ostringstream csv;
    write_transform_csv(csv, table);
    file = dir / "transform.csv";
    write_file(file, csv.str());
  } else {
    file = dir / "transform.json";
    write_file(file, dump(transform_json(table)));
  }
  const auto flagged = std::count_if(table.flags.begin(), table.flags.end(),
                                     [](std::uint32_t f) { return f != 0; });
  out << "wrote " << file.string() << " (" << table.rows.size() << " rows, "
      << flagged << " flagged)\n";
  return kExitOk;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  SuiteOptions opt;
  opt.seed = cfg.effective_seed();
  opt.conservation = cfg.traj;
  opt.only = cfg.only;
  opt.corrupt_h1 = cfg.corrupt_h1;
  if (cfg.input) {
    opt.input = load_trajectory(*cfg.input);
    opt.input_name = cfg.input->string();
  }
  const VerificationReport report = run_suite(opt);
  const std::string json = dump(report_json(report));
  if (!cfg.out_dir.empty()) write_file(output_dir(cfg) / "verify.json", json);
  out << (cfg.format == Format::json ? json : report_table(report));
  return report.all_pass() ? kExitOk : kExitCheckFailure;
}

int cmd_report(const RunConfig& cfg, std::ostream& out) {
  if (!cfg.input) throw ConfigError("report needs --input <verify.json>");
  std::ifstream in(*cfg.input);
  if (!in) throw ConfigError("cannot open " + cfg.input->string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(cfg.input->string() + ": " + e.what());
  }
  const VerificationReport report = report_from_json(j);
  out << (cfg.format == Format::json ? dump(report_json(report))
                                     : report_table(report));
  return report.all_pass() ? kExitOk : kExitCheckFailure;
}

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err, const char* env_seed) {
  CLI::App app{"Kovalevskaya top: simulate, transform and verify", "kovtop"};
  app.set_config("--config", "", "flat key=value file; flags override it");
  app.require_subcommand(1);

  RunConfig cfg;
  std::optional<std::uint64_t> seed;
  std::vector<double> state;
  std::string format = "csv", out_dir, input;

  app.add_option("--seed", seed, "64-bit seed (fallback: $KOVTOP_SEED)");
  app.add_option("--state", state, "initial state m1,m2,m3,n1,n2,n3")
      ->expected(6)
      ->delimiter(',');
  app.add_option("--t-end", cfg.traj.t_end, "integration end time")
      ->capture_default_str();
  app.add_option("--rtol", cfg.traj.rtol, "relative tolerance")
      ->capture_default_str();
  app.add_option("--atol", cfg.traj.atol, "absolute tolerance")
      ->capture_default_str();
  app.add_option("--sample-dt", cfg.traj.sample_dt, "output sample spacing")
      ->capture_default_str();
  app.add_option("--only", cfg.only, "run checks whose tag starts with this");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--format", format, "csv or json")->capture_default_str();
  app.add_option("--input", input,
                 "trajectory file (transform, verify) or verify.json (report)");
  app.add_option("--corrupt-h1", cfg.corrupt_h1,
                 "test hook: perturb h1 wherever checks consume it")
      ->group("Testing");

  using Command = int (*)(const RunConfig&, std::ostream&);
  Command command = nullptr;
  auto sub = [&](const char* name, const char* help, Command c) {
    app.add_subcommand(name, help)->fallthrough()->callback([&command, c] {
      command = c;
    });
  };
  sub("simulate", "integrate and write the trajectory with a JSON sidecar",
      cmd_simulate);
  sub("transform", "write f, g, s, x, y and u along a trajectory",
      cmd_transform);
  sub("verify", "run the verification suite", cmd_verify);
  sub("report", "print a saved verification report", cmd_report);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    cfg.seed = seed;
    if (!state.empty()) cfg.state = parse_state(state);
    cfg.format = parse_format(format);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (!input.empty()) cfg.input = fs::path(input);
    resolve_seed(cfg, env_seed);
    cfg.traj.validate();
    return command(cfg, out);
  } catch (const ConfigError& e) {
    err << "kovtop: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IntegrationError& e) {
    err << "kovtop: integration failed: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "kovtop: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace kovtop::cli
