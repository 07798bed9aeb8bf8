#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "scmocc/csv.hpp"
#include "scmocc/diagnostics.hpp"
#include "scmocc_cli/commands.hpp"
#include "scmocc_cli/config.hpp"

using namespace scmocc;
using namespace scmocc::cli;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("scmocc_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write_config(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  int run(const std::string& command, const fs::path& config, const fs::path& out,
          bool ehrenfest = false) {
    CommandOptions o;
    o.config = config;
    o.out = out;
    o.jobs = 1;
    o.ehrenfest = ehrenfest;
    std::ostringstream log;
    err_.str("");
    return dispatch(command, o, log, err_);
  }

  fs::path dir_;
  std::ostringstream err_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Data rows of a CSV file written by the tool: header comments and the column
// line are skipped.
std::vector<std::vector<std::string>> rows_of(const fs::path& p, std::vector<std::string>* columns = nullptr) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  bool seen_columns = false;
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("#", 0) == 0) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (!seen_columns) {
      seen_columns = true;
      if (columns) *columns = cells;
      continue;
    }
    rows.push_back(std::move(cells));
  }
  return rows;
}

// std::stod rejects subnormal values, which tapered couplings legitimately produce.
double to_double(const std::string& cell) { return std::strtod(cell.c_str(), nullptr); }

const char* kZeroCoupling = R"(potential.model = landau_zener
potential.coupling = 0
collision.v0 = 0.2, 0.4
collision.b = 2
propagator.method = diagonalization
propagator.dt = 0.05
)";

const char* kTwoState = R"(# exothermic two-state system
potential.model = exponential
potential.asymptotes = 0, -0.05
potential.amplitude = 1.0 0.08 1.5
potential.decay = 1.0 0.8 1.1
collision.v0 = 0.6, 1.0
collision.b = 1
propagator.method = rkf45
propagator.tolerance = 1e-8
scan.db = 0.2
)";

}  // namespace

TEST(Csv, NumbersAndLayout) {
  EXPECT_EQ(csv_number(0.1), "0.1");
  EXPECT_EQ(csv_number(1.0), "1");
  EXPECT_EQ(csv_number(-2.5e-12), "-2.5e-12");
  EXPECT_EQ(std::stod(csv_number(1.0 / 3.0)), 1.0 / 3.0);
  EXPECT_EQ(csv_number(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_EQ(csv_number(std::numeric_limits<double>::infinity()), "inf");
  CsvTable t;
  t.header = {"scmocc test"};
  t.columns = {"a", "b"};
  t.add_row({"1", "2"});
  EXPECT_EQ(to_csv(t), "# scmocc test\na,b\n1,2\n");
  EXPECT_THROW(t.add_row({"1"}), ConfigError);
}

TEST(ConfigFileTest, ParsesValuesAndRejectsProblems) {
  const ConfigFile f = ConfigFile::parse(
      "# comment\n\na.x = 1.5  # trailing\na.list = 1, 2 3\na.flag = yes\na.name = synthetic\n");
  EXPECT_EQ(f.number("a.x", 0.0), 1.5);
  EXPECT_EQ(f.numbers("a.list"), (std::vector<double>{1.0, 2.0, 3.0}));
  EXPECT_TRUE(f.flag("a.flag", false));
  EXPECT_EQ(f.text("a.name", ""), "synthetic");
  EXPECT_EQ(f.number("a.missing", 4.0), 4.0);
  EXPECT_NO_THROW(f.reject_unused());

  EXPECT_THROW(ConfigFile::parse("a.x = 1\na.x = 2\n"), ConfigError);
  EXPECT_THROW(ConfigFile::parse("just words\n"), ConfigError);
  EXPECT_THROW(ConfigFile::parse("a.x = abc\n").number("a.x", 0.0), ConfigError);
  EXPECT_THROW(ConfigFile::parse("a.x = maybe\n").flag("a.x", false), ConfigError);

  const ConfigFile g = ConfigFile::parse("a.used = 1\na.typo = 2\n");
  g.number("a.used", 0.0);
  try {
    g.reject_unused();
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("a.typo"), std::string::npos);
  }
}

TEST(ConfigFileTest, HashIgnoresOutputDirectoryOnly) {
  const std::string base = std::string(kZeroCoupling);
  const RunConfig a = resolve(ConfigFile::parse(base + "output.dir = x\n"));
  const RunConfig b = resolve(ConfigFile::parse(base + "output.dir = y\n"));
  const RunConfig c = resolve(ConfigFile::parse(base + "collision.mu = 2\n"));
  EXPECT_EQ(a.hash, b.hash);
  EXPECT_NE(a.hash, c.hash);
  EXPECT_EQ(hex64(fnv1a64("")), "cbf29ce484222325");
}

TEST(ConfigFileTest, ResolveChecksPotentialAndChannels) {
  EXPECT_THROW(resolve(ConfigFile::parse("collision.v0 = 1\n")), ConfigError);
  EXPECT_THROW(resolve(ConfigFile::parse("potential.model = synthetic\npotential.file = x\ncollision.v0 = 1\n")),
               ConfigError);
  EXPECT_EQ(resolve(ConfigFile::parse("potential.model = synthetic\n")).v0, std::vector<double>{0.5});
  EXPECT_THROW(resolve(ConfigFile::parse("potential.model = synthetic\ncollision.v0 = 0.3, -1\n")), ConfigError);
  EXPECT_THROW(resolve(ConfigFile::parse("potential.model = synthetic\ncollision.v0 = 1\npropagator.method = euler\n")),
               ConfigError);
  const RunConfig c = resolve(ConfigFile::parse(
      "potential.model = synthetic\npotential.n = 3\ncollision.v0 = 1\ncollision.initial_channel = 4\n"));
  EXPECT_THROW(load_potential(c), ConfigError);
  const RunConfig d = resolve(ConfigFile::parse(
      "potential.model = synthetic\npotential.n = 3\ncollision.v0 = 1\ncollision.initial_channel = 2\n"
      "trajectory.kind = curvilinear\ntrajectory.averaging = channel3\n"));
  EXPECT_EQ(d.initial_channel, 1u);
  EXPECT_EQ(d.collision.scheme, AveragingScheme::single(2));
  EXPECT_EQ(load_potential(d).n(), 3u);
}

TEST_F(CliTest, MissingPotentialFileIsConfigError) {
  const auto cfg = write_config("c.conf", "potential.file = nowhere.dat\ncollision.v0 = 1\n");
  EXPECT_EQ(run("run", cfg, dir_ / "out"), kExitConfig);
  EXPECT_NE(err_.str().find("nowhere.dat"), std::string::npos);
}

TEST_F(CliTest, UnknownCommandIsConfigError) {
  const auto cfg = write_config("c.conf", kZeroCoupling);
  EXPECT_EQ(run("fly", cfg, dir_ / "out"), kExitConfig);
}

TEST_F(CliTest, StepUnderflowIsPhysicsError) {
  const auto cfg = write_config("c.conf", R"(potential.model = synthetic
collision.v0 = 0.5
propagator.method = rkf45
propagator.tolerance = 1e-14
propagator.dt_min = 1
)");
  EXPECT_EQ(run("run", cfg, dir_ / "out"), kExitPhysics);
}

TEST_F(CliTest, ZeroCouplingHistoryIsConstant) {
  const auto cfg = write_config("c.conf", kZeroCoupling);
  ASSERT_EQ(run("run", cfg, dir_ / "out"), kExitOk) << err_.str();
  for (const char* name : {"history_1.csv", "history_2.csv"}) {
    std::vector<std::string> columns;
    const auto rows = rows_of(dir_ / "out" / name, &columns);
    ASSERT_FALSE(rows.empty());
    EXPECT_EQ(columns, (std::vector<std::string>{"t", "R", "P_1", "P_2", "P_total"}));
    // Diagonal V keeps channel 2 empty; the unitary step keeps channel 1 at 1 up to roundoff.
    for (const auto& r : rows) {
      EXPECT_NEAR(to_double(r[2]), 1.0, 1e-12);
      EXPECT_EQ(r[3], "0");
    }
  }
  const std::string head = slurp(dir_ / "out" / "run_summary.csv");
  EXPECT_NE(head.find("config_hash"), std::string::npos);
  EXPECT_NE(head.find("potential"), std::string::npos);
}

TEST_F(CliTest, RerunIsByteIdentical) {
  const auto cfg = write_config("c.conf", kTwoState);
  ASSERT_EQ(run("run", cfg, dir_ / "a"), kExitOk) << err_.str();
  ASSERT_EQ(run("run", cfg, dir_ / "b"), kExitOk) << err_.str();
  ASSERT_EQ(run("scan", cfg, dir_ / "a"), kExitOk) << err_.str();
  ASSERT_EQ(run("scan", cfg, dir_ / "b"), kExitOk) << err_.str();
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(dir_ / "a")) {
    EXPECT_EQ(slurp(entry.path()), slurp(dir_ / "b" / entry.path().filename())) << entry.path();
    ++compared;
  }
  EXPECT_EQ(compared, 5u);
}

TEST_F(CliTest, TrajectoryDump) {
  const auto cfg = write_config("c.conf", std::string(kTwoState) + "trajectory.kind = curvilinear\n");
  CommandOptions o;
  o.config = cfg;
  o.out = dir_ / "out";
  o.jobs = 1;
  o.dump_trajectory = true;
  std::ostringstream log, err;
  ASSERT_EQ(dispatch("run", o, log, err), kExitOk) << err.str();
  EXPECT_TRUE(fs::exists(dir_ / "out" / "trajectory_1.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "out" / "trajectory_2.csv"));
}

TEST_F(CliTest, ScanCapWarns) {
  const auto cfg = write_config("c.conf", R"(potential.model = exponential
potential.asymptotes = 0, 0
potential.amplitude = 0 0.2 0
potential.decay = 1 0.05 1
grid.r_max = 400
grid.step = 0.05
collision.v0 = 1
propagator.method = rkf45
propagator.tolerance = 1e-7
scan.db = 0.5
scan.b_cap = 2
)");
  fixture::WarningCapture warnings;
  ASSERT_EQ(run("scan", cfg, dir_ / "out"), kExitOk) << err_.str();
  EXPECT_TRUE(warnings.contains("b_cap"));
  EXPECT_NE(slurp(dir_ / "out" / "opacity_1.csv").find("truncated: true"), std::string::npos);
}

TEST_F(CliTest, EhrenfestLeavesCrossSectionsUnchanged) {
  const auto cfg = write_config("c.conf", kTwoState);
  ASSERT_EQ(run("xsec", cfg, dir_ / "plain"), kExitOk) << err_.str();
  ASSERT_EQ(run("xsec", cfg, dir_ / "relabeled", true), kExitOk) << err_.str();
  std::vector<std::string> plain_cols, rel_cols;
  const auto plain = rows_of(dir_ / "plain" / "cross_sections.csv", &plain_cols);
  const auto rel = rows_of(dir_ / "relabeled" / "cross_sections.csv", &rel_cols);
  ASSERT_EQ(plain.size(), 2u);
  ASSERT_EQ(rel.size(), 2u);
  EXPECT_EQ(plain_cols, (std::vector<std::string>{"v0", "K_eV", "sigma_1", "sigma_2"}));
  EXPECT_EQ(rel_cols.size(), 6u);
  for (std::size_t k = 0; k < 2; ++k) {
    for (std::size_t c = 0; c < 4; ++c) EXPECT_EQ(plain[k][c], rel[k][c]);
    EXPECT_EQ(rel[k][4], rel[k][1]);  // elastic axis keeps K
    EXPECT_LT(to_double(rel[k][5]), to_double(rel[k][1]));
  }
}

TEST_F(CliTest, SesWritesComparisonTable) {
  const auto cfg = write_config("c.conf", R"(potential.model = landau_zener
collision.v0 = 0.2
collision.b = 2
propagator.method = rkf45
propagator.tolerance = 1e-10
device.method = rkf45
device.tolerance = 1e-10
device.dt = 0.001
device.samples_per_half = 500
)");
  ASSERT_EQ(run("ses", cfg, dir_ / "out"), kExitOk) << err_.str();
  std::vector<std::string> columns;
  const auto rows = rows_of(dir_ / "out" / "ses_comparison_1.csv", &columns);
  EXPECT_EQ(columns, (std::vector<std::string>{"i", "f", "P_classical", "P_ses", "relative_error_percent"}));
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& r : rows) EXPECT_NEAR(to_double(r[2]), to_double(r[3]), 1e-6);
  for (const char* name : {"ses_mapping_1.csv", "ses_hamiltonian_1.csv", "ses_probabilities_1.csv",
                           "classical_history_1.csv"})
    EXPECT_TRUE(fs::exists(dir_ / "out" / name)) << name;
  for (const auto& r : rows_of(dir_ / "out" / "ses_hamiltonian_1.csv"))
    for (std::size_t c = 1; c < r.size(); ++c) EXPECT_LE(std::abs(to_double(r[c])), 50.0 + 1e-12);
}

TEST_F(CliTest, BenchWritesEveryConfiguration) {
  const auto cfg = write_config("c.conf", R"(potential.model = synthetic
collision.v0 = 2
bench.reference_dt = 0.001
)");
  ASSERT_EQ(run("bench", cfg, dir_ / "out"), kExitOk) << err_.str();
  const auto rows = rows_of(dir_ / "out" / "bench.csv");
  ASSERT_EQ(rows.size(), 10u);
  for (const auto& r : rows) EXPECT_EQ(r.back(), "ok") << r.front();
  const std::string text = slurp(dir_ / "out" / "bench.csv");
  EXPECT_NE(text.find("machine: "), std::string::npos);
  EXPECT_NE(text.find("reference: "), std::string::npos);
}
