#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "uniperf/io.hpp"

namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("uniperf_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::string& args) const {
    const std::string cmd = std::string("\"") + UNIPERF_CLI + "\" " + args + " 2>\"" + (dir_ / "stderr.txt").string() + "\"";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string read(const std::string& name) const {
    std::ifstream is(path(name), std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
  }
  nlohmann::json json(const std::string& name) const { return nlohmann::json::parse(read(name)); }
  void write(const std::string& name, const std::string& text) const { std::ofstream(path(name), std::ios::binary) << text; }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, JuliaPowerTwoNearUnitCircle) {
  ASSERT_EQ(run("julia --map power2 --budget 10000 --seed 7 --out " + path("c.csv")), 0);
  std::ifstream is(path("c.csv"));
  const auto c = uniperf::io::read_cloud(is);
  EXPECT_EQ(c.size(), 10000u);
  for (const auto& p : c.points) ASSERT_NEAR(p.norm(), 1.0, 1e-5);
  EXPECT_EQ(c.get("seed"), "7");
}

TEST_F(Cli, JuliaQuadMinusTwoNearSegment) {
  ASSERT_EQ(run("julia --map quad:-2 --budget 3000 --seed 1 --out " + path("c.csv")), 0);
  std::ifstream is(path("c.csv"));
  for (const auto& p : uniperf::io::read_cloud(is).points) {
    ASSERT_LT(std::abs(p[1]), 1e-4);
    ASSERT_LT(std::abs(p[0]), 2.0 + 1e-4);
  }
}

TEST_F(Cli, JuliaIsDeterministic) {
  ASSERT_EQ(run("julia --map quad:-1 --budget 500 --seed 3 --out " + path("a.csv")), 0);
  ASSERT_EQ(run("julia --map quad:-1 --budget 500 --seed 3 --out " + path("b.csv")), 0);
  EXPECT_EQ(read("a.csv"), read("b.csv"));
}

TEST_F(Cli, UnknownPresetIsUsageError) {
  EXPECT_EQ(run("julia --map nosuch"), 2);
  EXPECT_NE(read("stderr.txt").find("nosuch"), std::string::npos);
}

TEST_F(Cli, MissingSubcommandIsUsageError) { EXPECT_EQ(run(""), 2); }

TEST_F(Cli, HelpExitsZero) { EXPECT_EQ(run("--help >/dev/null"), 0); }

TEST_F(Cli, AnalyzeEmptyFileIsUsageError) {
  write("empty.csv", "");
  EXPECT_EQ(run("analyze " + path("empty.csv")), 2);
}

TEST_F(Cli, AnalyzeMalformedFileReportsLine) {
  write("bad.csv", "# dim=2\n0,0\n1,zz\n");
  EXPECT_EQ(run("analyze " + path("bad.csv")), 2);
  EXPECT_NE(read("stderr.txt").find("line 3"), std::string::npos);
}

TEST_F(Cli, AnalyzeMissingFileIsUsageError) { EXPECT_EQ(run("analyze " + path("none.csv")), 2); }

TEST_F(Cli, AnalyzeWritesReportAndSvg) {
  ASSERT_EQ(run("julia --map power2 --depth 9 --out " + path("c.csv")), 0);
  ASSERT_EQ(run("analyze " + path("c.csv") + " --out " + path("r.json") + " --svg " + path("r.svg")), 0);
  const auto j = json("r.json");
  EXPECT_EQ(j["schema"], 1);
  EXPECT_EQ(j["command"], "analyze");
  EXPECT_LE(j["report"]["alpha_hat"].get<double>(), std::log(4.0));
  EXPECT_FALSE(j["report"]["witnesses"].empty());
  EXPECT_EQ(read("r.svg").rfind("<svg", 0), 0u);
}

TEST_F(Cli, OutputDirectoryFromEnvironment) {
  ::setenv("UNIPERF_OUT_DIR", dir_.c_str(), 1);
  const int code = run("julia --map quad:-1 --budget 100");
  ::unsetenv("UNIPERF_OUT_DIR");
  ASSERT_EQ(code, 0);
  EXPECT_TRUE(fs::exists(dir_ / "quad_-1.csv"));
}

TEST_F(Cli, ModulusOfTheUnitLogRing) {
  ASSERT_EQ(run("modulus --ring 1:2.71828 --n 2 --grid 128 --out " + path("m.json")), 0);
  const auto j = json("m.json");
  EXPECT_NEAR(j["ring_modulus"].get<double>(), 1.0, 0.05);
  EXPECT_EQ(j["config"]["n"], 2);
}

TEST_F(Cli, ModulusRejectsBadRing) {
  EXPECT_EQ(run("modulus --ring 2:1"), 2);
  EXPECT_EQ(run("modulus --ring abc"), 2);
}

TEST_F(Cli, TauIsStrictlyDecreasing) {
  ASSERT_EQ(run("tau --n 2 --s 1,2,4,8 --grid 16 --out " + path("t.json")), 0);
  const auto j = json("t.json");
  EXPECT_TRUE(j["strictly_decreasing"].get<bool>());
  ASSERT_EQ(j["values"].size(), 4u);
  for (const auto& v : j["values"]) EXPECT_GT(v["tau"].get<double>(), 0.0);
}

TEST_F(Cli, QuasihyperbolicBallDistance) {
  ASSERT_EQ(run("qh --ball --from 0 --to 0.9 --out " + path("q.json")), 0);
  EXPECT_NEAR(json("q.json")["distance"].get<double>(), std::log(10.0), 0.05 * std::log(10.0));
}

TEST_F(Cli, QuasihyperbolicPointOutsideIsUsageError) { EXPECT_EQ(run("qh --ball --to 1.5"), 2); }

TEST_F(Cli, DimensionOfACircle) {
  ASSERT_EQ(run("julia --map power2 --budget 10000 --seed 2 --out " + path("c.csv")), 0);
  ASSERT_EQ(run("dimension " + path("c.csv") + " --out " + path("d.json") + " --svg " + path("d.svg")), 0);
  const auto j = json("d.json");
  EXPECT_NEAR(j["fit"]["slope"].get<double>(), 1.0, 0.1);
  EXPECT_GT(j["content"]["min_ratio"].get<double>(), 0.0);
}

TEST_F(Cli, VerifyWithCoarseGridFails) {
  EXPECT_EQ(run("verify --grid 8 --preset quad:0 --cases 0 --out " + path("v.json")), 1);
  const auto j = json("v.json");
  EXPECT_FALSE(j["pass"].get<bool>());
  bool flagged = false;
  for (const auto& s : j["stages"])
    if (!s["pass"].get<bool>() && s.value("note", std::string()).find("coarse") != std::string::npos) flagged = true;
  EXPECT_TRUE(flagged);
}
