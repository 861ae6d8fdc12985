#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "kovtop/errors.hpp"
#include "kovtop_cli/commands.hpp"
#include "kovtop_cli/trajectory_io.hpp"
#include "kovtop_cli/transform.hpp"
#include "kovtop_cli/verify_suite.hpp"

namespace kovtop::cli {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("kovtop_test_" + std::to_string(counter_++) + "_" +
             ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Outcome {
  int code;
  std::string out, err;
};

Outcome call(const std::vector<std::string>& args, const char* env = nullptr) {
  std::ostringstream out, err;
  const int code = run(args, out, err, env);
  return {code, out.str(), err.str()};
}

TEST(NumberFormat, RoundTripsExactly) {
  for (double v : {0.0, -0.0, 1.0, 0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23,
                   std::numeric_limits<double>::denorm_min(),
                   std::numeric_limits<double>::max()}) {
    const std::string s = format_double(v);
    EXPECT_EQ(parse_double(s), v) << s;
    EXPECT_LE(s.size(), 24u);
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(std::nan("")), "nan");
  EXPECT_EQ(format_double(-std::numeric_limits<double>::infinity()), "-inf");
  EXPECT_TRUE(std::isnan(parse_double("nan")));
  EXPECT_THROW(parse_double("1.0x"), ConfigError);
  EXPECT_THROW(parse_double(""), ConfigError);
}

TEST(TrajectoryCsv, WriteReadRoundTrip) {
  TrajectoryConfig cfg;
  cfg.t_end = 1;
  const Trajectory tr = integrate(EuclideanState(Vec3(0.3, 0.8, -0.2), Vec3(0.1, 0.5, 0.9)), cfg);
  std::stringstream ss;
  write_trajectory_csv(ss, tr);
  EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')), kTrajectoryHeader);
  const Trajectory back = read_trajectory_csv(ss);
  ASSERT_EQ(back.size(), tr.size());
  for (std::size_t i = 0; i < tr.size(); ++i) {
    EXPECT_EQ(back.time(i), tr.time(i));
    EXPECT_EQ(back.state(i).to_vector(), tr.state(i).to_vector());
  }
}

TEST(TrajectoryCsv, RejectsMalformedInput) {
  auto read = [](const std::string& s) {
    std::istringstream is(s);
    return read_trajectory_csv(is);
  };
  EXPECT_THROW(read("t,m1\n0,1\n"), ConfigError);
  EXPECT_THROW(read(std::string(kTrajectoryHeader) + "\n0,1,2,3\n"), ConfigError);
  EXPECT_THROW(read(std::string(kTrajectoryHeader) + "\n0,1,2,3,4,5,x\n"), ConfigError);
  EXPECT_THROW(read(std::string(kTrajectoryHeader) +
                    "\n0,1,1,1,1,1,1\n0.1,1,1,1,1,1,1\n0.5,1,1,1,1,1,1\n"),
               ConfigError);
  EXPECT_THROW(read(std::string(kTrajectoryHeader) + "\n"), ConfigError);
}

TEST(TrajectoryJson, RoundTrip) {
  TrajectoryConfig cfg;
  cfg.t_end = 0.5;
  const Trajectory tr = integrate(EuclideanState(Vec3(0.3, 0.8, -0.2), Vec3(0.1, 0.5, 0.9)), cfg);
  const Json j = trajectory_json(tr, RunInfo{7, cfg});
  EXPECT_EQ(j["seed"], 7);
  EXPECT_EQ(j["samples_count"], tr.size());
  const Trajectory back = read_trajectory_json(Json::parse(dump(j)));
  ASSERT_EQ(back.size(), tr.size());
  EXPECT_EQ(back.state(back.size() - 1).to_vector(), tr.state(tr.size() - 1).to_vector());
}

TEST(ExitCodes, ConfigurationErrors) {
  EXPECT_EQ(call({}).code, kExitConfig);
  EXPECT_EQ(call({"bogus"}).code, kExitConfig);
  EXPECT_EQ(call({"simulate", "--t-end", "-1"}).code, kExitConfig);
  EXPECT_EQ(call({"simulate", "--seed", "3", "--state", "0,1,0,0,0,0"}).code, kExitConfig);
  EXPECT_EQ(call({"simulate", "--state", "0,1,0"}).code, kExitConfig);
  EXPECT_EQ(call({"verify", "--only", "NoSuchTag"}).code, kExitConfig);
  EXPECT_EQ(call({"report"}).code, kExitConfig);
  EXPECT_EQ(call({"transform", "--input", "/nonexistent/traj.csv"}).code, kExitConfig);
  EXPECT_EQ(call({"simulate", "--t-end", "1"}, "not-a-seed").code, kExitConfig);
  EXPECT_EQ(call({"simulate", "--format", "xml"}).code, kExitConfig);
}

TEST(ExitCodes, NumericalFailure) {
  TempDir d;
  EXPECT_EQ(call({"simulate", "--rtol", "1e-30", "--atol", "1e-30", "--t-end", "1",
                  "--out", d.path().string()})
                .code,
            kExitNumerical);
}

TEST(Simulate, EquilibriumGivesConstantColumns) {
  TempDir d;
  const Outcome o = call({"simulate", "--state", "0,0,0,1,0,0", "--t-end", "2", "--out",
                          d.path().string()});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  std::ifstream in(d.path() / "trajectory.csv");
  const Trajectory tr = read_trajectory_csv(in);
  for (std::size_t i = 0; i < tr.size(); ++i)
    EXPECT_EQ(tr.state(i).to_vector(), tr.state(0).to_vector());
  const Json side = Json::parse(slurp(d.path() / "trajectory.meta.json"));
  EXPECT_TRUE(side["seed"].is_null());
  EXPECT_EQ(side["drift"]["max"], 0.0);
}

TEST(Simulate, SeedFromEnvironmentAndDeterminism) {
  TempDir a, b;
  ASSERT_EQ(call({"simulate", "--t-end", "3", "--out", a.path().string()}, "5").code, kExitOk);
  ASSERT_EQ(call({"simulate", "--seed", "5", "--t-end", "3", "--out", b.path().string()}).code,
            kExitOk);
  EXPECT_EQ(slurp(a.path() / "trajectory.csv"), slurp(b.path() / "trajectory.csv"));
  EXPECT_EQ(slurp(a.path() / "trajectory.meta.json"), slurp(b.path() / "trajectory.meta.json"));
  const Json side = Json::parse(slurp(a.path() / "trajectory.meta.json"));
  EXPECT_EQ(side["seed"], 5);
  EXPECT_LT(side["drift"]["max"].get<double>(), 1e-8);
}

TEST(Simulate, LongRunDriftBudget) {
  TempDir d;
  ASSERT_EQ(call({"simulate", "--seed", "2", "--t-end", "100", "--rtol", "1e-10", "--out",
                  d.path().string()})
                .code,
            kExitOk);
  const Json side = Json::parse(slurp(d.path() / "trajectory.meta.json"));
  for (const char* k : {"h1", "k2", "c3", "c4"})
    EXPECT_LT(side["drift"][k].get<double>(), 1e-8) << k;
}

TEST(Simulate, ConfigFileWithFlagOverride) {
  TempDir d;
  const fs::path cfg = d.path() / "run.ini";
  write_file(cfg, "# run\nseed=9\nt-end=4\n");
  ASSERT_EQ(call({"simulate", "--config", cfg.string(), "--t-end", "1", "--out",
                  d.path().string()})
                .code,
            kExitOk);
  const Json side = Json::parse(slurp(d.path() / "trajectory.meta.json"));
  EXPECT_EQ(side["seed"], 9);
  EXPECT_EQ(side["config"]["t_end"], 1.0);
}

TEST(Transform, EquilibriumWithValidChartIsConstant) {
  TempDir d;
  ASSERT_EQ(call({"transform", "--state", "0,0.7,0,0,0,0", "--t-end", "1", "--out",
                  d.path().string()})
                .code,
            kExitOk);
  std::ifstream in(d.path() / "transform.csv");
  std::string header, first, line;
  std::getline(in, header);
  std::getline(in, first);
  const auto tail = [](const std::string& s) { return s.substr(s.find(',')); };
  while (std::getline(in, line)) EXPECT_EQ(tail(line), tail(first));
}

TEST(Transform, AbelColumnsAreLinear) {
  TrajectoryConfig cfg;
  cfg.t_end = 5;
  cfg.sample_dt = 0.001;
  cfg.rtol = 1e-13;
  cfg.atol = 1e-14;
  const Trajectory tr =
      integrate(EuclideanState(Vec3(0.3, 0.9, -0.4), Vec3(0.5, -0.2, 0.6)), cfg);
  const TransformTable tab = transform(tr);
  auto col = [&](const std::string& name) {
    return static_cast<std::size_t>(std::find(tab.columns.begin(), tab.columns.end(), name) -
                                    tab.columns.begin());
  };
  const std::size_t re1 = col("Re_u1"), im1 = col("Im_u1"), im2 = col("Im_u2");
  ASSERT_LT(im2, tab.columns.size());
  std::size_t first = tab.rows.size(), used = 0;
  double max_u1 = 0, max_slope = 0;
  for (std::size_t i = 0; i < tab.rows.size(); ++i) {
    if (tab.flags[i] & (kFlagNoAbel | kFlagChart)) continue;
    if (first == tab.rows.size()) first = i;
    // Only compare within the first contiguous run.
    if (i != first + used) break;
    const auto& r = tab.rows[i];
    const auto& r0 = tab.rows[first];
    max_u1 = std::max({max_u1, std::abs(r[re1] - r0[re1]), std::abs(r[im1] - r0[im1])});
    if (i > first + 10)
      max_slope = std::max(max_slope, std::abs((r[im2] - r0[im2]) / (r[0] - r0[0]) - 1));
    ++used;
  }
  ASSERT_GT(used, 100u);
  EXPECT_LT(max_u1, 1e-5);
  EXPECT_LT(max_slope, 1e-5);
}

TEST(Verify, InputFileReproducesInMemoryRun) {
  TempDir d;
  ASSERT_EQ(call({"simulate", "--seed", "3", "--t-end", "20", "--sample-dt", "0.001",
                  "--rtol", "1e-13", "--atol", "1e-14", "--out", d.path().string()})
                .code,
            kExitOk);
  const fs::path csv = d.path() / "trajectory.csv";
  std::ifstream in(csv);
  SuiteOptions opt;
  opt.seed = 3;
  opt.only = {"Eq7-10-conservation"};
  opt.input = read_trajectory_csv(in);
  opt.input_name = csv.string();
  const VerificationReport mem = run_suite(opt);
  ASSERT_EQ(mem.checks.size(), 1u);

  const Outcome o = call({"verify", "--input", csv.string(), "--seed", "3", "--only",
                          "Eq7-10", "--format", "json", "--out", d.path().string()});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  const VerificationReport cli = report_from_json(Json::parse(o.out));
  ASSERT_EQ(cli.checks.size(), 1u);
  EXPECT_EQ(cli.checks[0].value, mem.checks[0].value);
  EXPECT_TRUE(fs::exists(d.path() / "verify.json"));

  const Outcome rep = call({"report", "--input", (d.path() / "verify.json").string()});
  EXPECT_EQ(rep.code, kExitOk);
  EXPECT_NE(rep.out.find("Eq7-10-conservation"), std::string::npos);
}

TEST(Verify, CorruptedHamiltonianFailsTheSplit) {
  SuiteOptions opt;
  opt.only = {"Eq20", "Eq45"};
  opt.corrupt_h1 = 1e-6;
  const VerificationReport r = run_suite(opt);
  ASSERT_EQ(r.checks.size(), 2u);
  for (const auto& c : r.checks) {
    if (c.tag == "Eq20-split") {
      EXPECT_FALSE(c.pass);
    }
  }
  opt.corrupt_h1 = 0;
  EXPECT_TRUE(run_suite(opt).all_pass());

  const Outcome o = call({"verify", "--only", "Eq20", "--corrupt-h1", "1e-6"});
  EXPECT_EQ(o.code, kExitCheckFailure);
}

TEST(Verify, OnlySelectsByPrefix) {
  SuiteOptions opt;
  opt.only = {"Eq58"};
  const VerificationReport r = run_suite(opt);
  EXPECT_GE(r.checks.size(), 5u);
  for (const auto& c : r.checks) EXPECT_EQ(c.tag.rfind("Eq58", 0), 0u);
  const Json j = report_json(r);
  const VerificationReport back = report_from_json(j);
  EXPECT_EQ(back.checks.size(), r.checks.size());
  EXPECT_EQ(back.all_pass(), r.all_pass());
  EXPECT_TRUE(r.all_pass());
}

TEST(Catalog, CoversEveryCriterion) {
  std::set<int> seen;
  std::set<std::string> tags;
  for (const auto& c : check_catalog()) {
    seen.insert(c.criterion);
    EXPECT_TRUE(tags.insert(c.tag).second) << c.tag;
  }
  for (int k = 1; k <= 14; ++k) EXPECT_TRUE(seen.count(k)) << k;
}

}  // namespace
}  // namespace kovtop::cli
