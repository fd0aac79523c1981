#include "cli.hpp"

#include <gtest/gtest.h>

#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using manifold_descent::cli::run_cli;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  Result r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / ("md_cli_" + std::string(info->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string out(const std::string& sub) const { return (dir_ / sub).string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, RunWithDefaultsWritesAllFiles) {
  const auto r = cli({"run", "--out", out("run"), "--plot"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir_ / "run" / "traj.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "run" / "report.json"));
  EXPECT_TRUE(fs::exists(dir_ / "run" / "fig.svg"));
  const auto report = nlohmann::json::parse(slurp(dir_ / "run" / "report.json"));
  EXPECT_EQ(report["terminated_by"], "t_max");
  const std::string csv = slurp(dir_ / "run" / "traj.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,x1_0,x2_0,f,grad_norm,psi_norm,S,V_basic,V_exp");
  EXPECT_NE(r.out.find("proposed(alpha=1,beta=0.9)"), std::string::npos);
}

TEST_F(CliTest, MissingConfigFailsWithoutOutputs) {
  const auto r = cli({"run", "--config", out("absent.cfg"), "--out", out("never")});
  EXPECT_EQ(r.code, 1);
  EXPECT_FALSE(r.err.empty());
  EXPECT_FALSE(fs::exists(dir_ / "never"));
}

TEST_F(CliTest, BadConfigContentReportsPosition) {
  std::ofstream(dir_ / "bad.cfg") << "[integrator]\nh = 0.01\nspeed = 3\n";
  const auto r = cli({"run", "--config", out("bad.cfg"), "--out", out("never")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("bad.cfg:3"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(dir_ / "never"));
}

TEST_F(CliTest, UnknownFlagIsConfigError) {
  EXPECT_EQ(cli({"run", "--bogus"}).code, 1);
  EXPECT_EQ(cli({}).code, 1);
  EXPECT_EQ(cli({"run", "--format", "xml"}).code, 1);
}

TEST_F(CliTest, UnstableEulerExitsTwoAndKeepsTrajectory) {
  const auto r = cli({"run", "--out", out("div"), "--set", "method.family=gd_flow", "--set",
                      "integrator.scheme=euler", "--set", "integrator.h=3", "--set", "integrator.t_max=300"});
  EXPECT_EQ(r.code, 2) << r.err;
  const std::string csv = slurp(dir_ / "div" / "traj.csv");
  EXPECT_GT(std::count(csv.begin(), csv.end(), '\n'), 2);
  const auto report = nlohmann::json::parse(slurp(dir_ / "div" / "report.json"));
  EXPECT_EQ(report["terminated_by"], "divergence");
}

TEST_F(CliTest, ConfigFileAndFlagPrecedence) {
  std::ofstream(dir_ / "exp.cfg") << "[method]\nfamily = pni\nalpha = 2\nbeta = 0.5\n"
                                   << "[integrator]\nt_max = 2\n[output]\nformat = csv\n";
  const auto r = cli({"run", "--config", out("exp.cfg"), "--set", "integrator.t_max=3", "--out", out("p"),
                      "--format", "both"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("pni(alpha=2,beta=0.5)"), std::string::npos);
  const std::string csv = slurp(dir_ / "p" / "traj.csv");
  const auto last = csv.substr(csv.rfind('\n', csv.size() - 2) + 1);
  EXPECT_EQ(last.substr(0, last.find(',')), "3");
}

TEST_F(CliTest, CompareWritesSummaries) {
  const auto r = cli({"compare", "--out", out("cmp"), "--plot", "--log-y"});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(slurp(dir_ / "cmp" / "compare.json"));
  ASSERT_EQ(j.size(), 3u);
  EXPECT_EQ(j[0]["label"], "gd_flow");
  EXPECT_TRUE(fs::exists(dir_ / "cmp" / "compare.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "cmp" / "compare.svg"));
}

TEST_F(CliTest, FormatSelectsFiles) {
  EXPECT_EQ(cli({"compare", "--out", out("j"), "--format", "json"}).code, 0);
  EXPECT_TRUE(fs::exists(dir_ / "j" / "compare.json"));
  EXPECT_FALSE(fs::exists(dir_ / "j" / "compare.csv"));
  EXPECT_EQ(cli({"compare", "--out", out("c"), "--format", "csv"}).code, 0);
  EXPECT_FALSE(fs::exists(dir_ / "c" / "compare.json"));
  EXPECT_TRUE(fs::exists(dir_ / "c" / "compare.csv"));
}

TEST_F(CliTest, SweepIsByteReproducible) {
  const std::vector<std::string> common{"--set", "perturbation.delta=1e-3", "--set", "sweep.seeds=1..3",
                                        "--set", "integrator.h=0.01"};
  auto args = [&](const std::string& d) {
    std::vector<std::string> a{"sweep", "--out", out(d)};
    a.insert(a.end(), common.begin(), common.end());
    return a;
  };
  ASSERT_EQ(cli(args("s1")).code, 0);
  ASSERT_EQ(cli(args("s2")).code, 0);
  auto single = args("s3");
  single.insert(single.end(), {"--set", "output.threads=1"});
  ASSERT_EQ(cli(single).code, 0);
  const std::string a = slurp(dir_ / "s1" / "sweep.csv");
  EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 1 + 2 * 3 * 2 * 3);
  EXPECT_EQ(a, slurp(dir_ / "s2" / "sweep.csv"));
  EXPECT_EQ(a, slurp(dir_ / "s3" / "sweep.csv"));
}

TEST_F(CliTest, SeedFlagChangesPerturbedSweep) {
  const std::vector<std::string> base{"--set", "perturbation.delta=1e-2", "--set", "sweep.alphas=1",
                                      "--set", "sweep.betas=0.9"};
  auto args = [&](const std::string& d, const std::string& seed) {
    std::vector<std::string> a{"sweep", "--out", out(d), "--seed", seed};
    a.insert(a.end(), base.begin(), base.end());
    return a;
  };
  ASSERT_EQ(cli(args("a", "1")).code, 0);
  ASSERT_EQ(cli(args("b", "2")).code, 0);
  EXPECT_NE(slurp(dir_ / "a" / "sweep.csv"), slurp(dir_ / "b" / "sweep.csv"));
}

TEST_F(CliTest, PersistWritesControlRows) {
  const auto r = cli({"persist", "--out", out("per"), "--set", "persist.seeds=0..4"});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(slurp(dir_ / "per" / "persist.json"));
  ASSERT_EQ(j.size(), 4u);
  EXPECT_EQ(j[0]["delta"], 0.0);
  EXPECT_EQ(j[2]["n_seeds"], 5);
}

TEST_F(CliTest, PlotIsDeterministic) {
  ASSERT_EQ(cli({"run", "--out", out("a"), "--plot"}).code, 0);
  ASSERT_EQ(cli({"run", "--out", out("b"), "--plot"}).code, 0);
  EXPECT_EQ(slurp(dir_ / "a" / "fig.svg"), slurp(dir_ / "b" / "fig.svg"));
}

TEST_F(CliTest, BinaryExitCodes) {
  const std::string bin = MANIFOLD_DESCENT_CLI_PATH;
  auto status = [](const std::string& cmd) {
    const int s = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  EXPECT_EQ(status(bin + " run --out " + out("ok")), 0);
  EXPECT_EQ(status(bin + " run --config " + out("missing.cfg") + " --out " + out("no")), 1);
  EXPECT_EQ(status(bin + " run --out " + out("d") +
                   " --set method.family=gd_flow --set integrator.scheme=euler --set integrator.h=3"
                   " --set integrator.t_max=300"),
            2);
  EXPECT_FALSE(fs::exists(dir_ / "no"));
}
