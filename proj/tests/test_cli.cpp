#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

#include "fevolve/cli.hpp"
#include "fevolve/error.hpp"

using namespace fevolve;
namespace fs = std::filesystem;

namespace {
fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fevolve_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(FEVOLVE_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}
}  // namespace

TEST(Config, JsonRoundTrip) {
  cli::RunConfig c;
  c.command = "spectral-study";
  c.preset = "heat_1d";
  c.h = {0.125, 0.0625};
  c.r = 0.5;
  c.dt = 1e-6;
  c.k = 5;
  c.seed = 99;
  c.out_dir = "out";
  const auto j = cli::to_json(c);
  EXPECT_EQ(cli::config_from_json(j), c);
  EXPECT_EQ(cli::to_json(cli::config_from_json(j)).dump(), j.dump());
}

TEST(Config, UnknownKeyIsParseError) {
  try {
    (void)cli::config_from_json(nlohmann::json{{"comand", "x"}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigParse);
  }
  EXPECT_THROW((void)cli::config_from_json(nlohmann::json{{"k", "eight"}}), Error);
}

TEST(Run, ListPresets) {
  cli::RunConfig c;
  c.command = "list-presets";
  const auto res = cli::run(c);
  EXPECT_EQ(res.exit_code, 0);
  EXPECT_EQ(res.summary["presets"].size(), 4u);
}

TEST(Run, SpectralStudyWritesMonotoneCsv) {
  const auto dir = scratch("spectral");
  cli::RunConfig c;
  c.command = "spectral-study";
  c.preset = "heat_1d";
  c.h = {1.0 / 16, 1.0 / 8, 1.0 / 64, 1.0 / 32};
  c.out_dir = dir.string();
  const auto res = cli::run(c);
  EXPECT_EQ(res.exit_code, 0);
  std::istringstream csv(slurp(dir / "spectral-study_heat_1d_sweep.csv"));
  std::string line;
  std::getline(csv, line);
  double prev_h = 1.0;
  double prev_l = 1e300;
  int rows = 0;
  while (std::getline(csv, line)) {
    std::istringstream ls(line);
    std::string h;
    std::string l;
    std::getline(ls, h, ',');
    std::getline(ls, l, ',');
    EXPECT_LT(std::stod(h), prev_h);
    EXPECT_LE(std::stod(l), prev_l);
    prev_h = std::stod(h);
    prev_l = std::stod(l);
    ++rows;
  }
  EXPECT_EQ(rows, 4);
  EXPECT_TRUE(fs::exists(dir / "spectral-study_heat_1d_summary.json"));
}

TEST(Run, OutputIsDeterministic) {
  const auto a = scratch("det_a");
  const auto b = scratch("det_b");
  for (const auto& dir : {a, b}) {
    cli::RunConfig c;
    c.command = "solve-evolution";
    c.preset = "nls_1d";
    c.h = {1.0 / 8, 1.0 / 16};
    c.out_dir = dir.string();
    EXPECT_EQ(cli::run(c).exit_code, 0);
  }
  for (const char* f : {"solve-evolution_nls_1d_0.125.csv", "solve-evolution_nls_1d_0.0625.csv"}) {
    const std::string sa = slurp(a / f);
    EXPECT_FALSE(sa.empty());
    EXPECT_EQ(sa, slurp(b / f)) << f;
  }
}

TEST(Run, SolveElliptic) {
  const auto dir = scratch("elliptic");
  cli::RunConfig c;
  c.command = "solve-elliptic";
  c.h = {1.0 / 16};
  c.out_dir = dir.string();
  const auto res = cli::run(c);
  EXPECT_EQ(res.exit_code, 0);
  const auto j = nlohmann::json::parse(slurp(dir / "solve-elliptic_semilinear_poisson_2d_summary.json"));
  const auto& row = j["results"][0];
  for (const char* key : {"h", "dofs", "iterations", "K", "residual", "apriori_bound_at_k", "u_norm_inf"}) {
    EXPECT_TRUE(row.contains(key)) << key;
  }
  EXPECT_LE(row["residual"].get<double>(), 1e-10);
}

TEST(Run, ConvergenceStudyNeedsThreeSpacings) {
  cli::RunConfig c;
  c.command = "convergence-study";
  c.h = {0.25, 0.125};
  c.out_dir = scratch("conv").string();
  EXPECT_THROW((void)cli::run(c), Error);
}

TEST(Binary, ExitCodes) {
  const auto dir = scratch("bin");
  EXPECT_EQ(run_binary("list-presets"), 0);
  EXPECT_EQ(run_binary("solve-elliptic --r 10 --h 1/8 --out " + dir.string()), 1);
  EXPECT_EQ(run_binary("solve-elliptic --h 1/8 --out " + dir.string()), 0);
  EXPECT_EQ(run_binary("frobnicate"), 1);
  EXPECT_EQ(run_binary("spectral-study --preset nope --out " + dir.string()), 1);
  EXPECT_EQ(run_binary("spectral-study --h 1/8,1/16,1/32 --out " + dir.string()), 0);
  // Pre-asymptotic grids: the fitted orders miss 2 +- 0.2, a certificate failure.
  EXPECT_EQ(run_binary("convergence-study --h 1/2,1/4,1/8 --out " + dir.string()), 2);
}

TEST(Binary, ConfigFileWithFlagOverride) {
  const auto dir = scratch("cfg");
  {
    std::ofstream f(dir / "run.json");
    f << R"({"preset": "heat_1d", "h": [0.125, 0.0625], "out_dir": "ignored"})";
  }
  EXPECT_EQ(run_binary("spectral-study --config " + (dir / "run.json").string() + " --out " + dir.string()), 0);
  EXPECT_TRUE(fs::exists(dir / "spectral-study_heat_1d_sweep.csv"));
  {
    std::ofstream f(dir / "bad.json");
    f << "{not json";
  }
  EXPECT_EQ(run_binary("spectral-study --config " + (dir / "bad.json").string()), 1);
}
