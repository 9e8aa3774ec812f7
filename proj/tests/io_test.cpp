#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "uniperf/io.hpp"
#include "uniperf/samples.hpp"
#include "uniperf/uqr/julia.hpp"

using namespace uniperf;

namespace {

PointCloud parse(const std::string& text) {
  std::istringstream is(text);
  return io::read_cloud(is);
}

int error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const InputError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST(CloudCsv, BitExactRoundTrip) {
  std::mt19937_64 g(41);
  PointCloud c;
  c.dim = 3;
  for (int i = 0; i < 2000; ++i) {
    double x[3];
    for (double& v : x) v = std::ldexp(std::uniform_real_distribution<double>(-1.0, 1.0)(g), static_cast<int>(g() % 80) - 40);
    c.points.push_back({x[0], x[1], x[2]});
  }
  c.points.push_back({0.1, -0.0, 5e-324});
  c.set("generator", "test");
  c.set("seed", "41");
  std::ostringstream os;
  io::write_cloud(os, c);
  const auto back = parse(os.str());
  EXPECT_EQ(back.dim, 3);
  EXPECT_EQ(back.meta, c.meta);
  ASSERT_EQ(back.points.size(), c.points.size());
  for (std::size_t i = 0; i < c.points.size(); ++i)
    for (int k = 0; k < 3; ++k) EXPECT_EQ(std::bit_cast<std::uint64_t>(back.points[i][k]), std::bit_cast<std::uint64_t>(c.points[i][k]));
  std::ostringstream again;
  io::write_cloud(again, back);
  EXPECT_EQ(again.str(), os.str());
}

TEST(CloudCsv, JuliaCloudRoundTrip) {
  const auto c = uqr::sample_julia(uqr::map_preset("quad:-1"), 500, 3);
  std::ostringstream os;
  io::write_cloud(os, c);
  const auto back = parse(os.str());
  EXPECT_EQ(back.points, c.points);
  EXPECT_EQ(back.sampling_scale(), c.sampling_scale());
}

TEST(CloudCsv, AcceptsBlankLinesAndSpaces) {
  const auto c = parse("# dim=2\n\n# map = power2\n 1.5 , -2\n\n3,4\r\n");
  EXPECT_EQ(c.size(), 2u);
  EXPECT_EQ(c.points[0], (ExtendedPoint{1.5, -2.0}));
  EXPECT_EQ(c.get("map"), "power2");
}

TEST(CloudCsv, MalformedInputsReportLines) {
  EXPECT_EQ(error_line(""), 0);
  EXPECT_EQ(error_line("# dim=2\n"), 1);
  EXPECT_EQ(error_line("1,2\n3,x\n"), 2);
  EXPECT_EQ(error_line("1,2\n3\n"), 2);
  EXPECT_EQ(error_line("# dim=3\n1,2\n"), 2);
  EXPECT_EQ(error_line("# dim=9\n1,2\n"), 1);
  EXPECT_EQ(error_line("# nokey\n1,2\n"), 1);
  EXPECT_EQ(error_line("1,2\n# late=1\n"), 2);
  EXPECT_EQ(error_line("1,2\n\n1,inf\n"), 3);
  EXPECT_EQ(error_line("1,,2\n"), 1);
  EXPECT_EQ(error_line("1,2,3,4,5\n"), 1);
}

TEST(CloudCsv, ErrorMessageNamesTheLine) {
  try {
    parse("0,0\n1,oops\n");
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(Json, ReportsCarrySchema) {
  const auto env = io::envelope("analyze", {{"seed", 1}});
  EXPECT_EQ(env["schema"], io::kSchema);
  EXPECT_EQ(env["command"], "analyze");
  EXPECT_EQ(env["config"]["seed"], 1);
  EXPECT_EQ(env.begin().key(), "schema");
}

TEST(Json, PerfectnessReportFields) {
  const auto j = io::to_json(analyze(cantor_cloud(5)));
  for (const char* k : {"alpha_hat", "epsilon", "witnesses", "refinement", "resolution_caveat"})
    EXPECT_TRUE(j.contains(k)) << k;
  EXPECT_FALSE(j["witnesses"].empty());
}

TEST(Json, DimensionFitFields) {
  const auto j = io::to_json(fit_dimension(cantor_cloud(8)));
  EXPECT_EQ(j["label"], "box dimension");
  EXPECT_EQ(j["epsilons"].size(), j["counts"].size());
}

TEST(Json, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 6.02214076e23}) EXPECT_EQ(std::stod(io::format_double(v)), v);
}

TEST(Svg, CloudPlotIsDeterministic) {
  const auto c = cantor_cloud(6);
  const auto r = analyze(c);
  const auto a = io::cloud_svg(c, r.witnesses), b = io::cloud_svg(c, r.witnesses);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.rfind("<svg", 0), 0u);
  EXPECT_NE(a.find("</svg>"), std::string::npos);
}

TEST(Svg, LogLogPlotIsDeterministic) {
  const auto f = fit_dimension(cantor_cloud(8));
  EXPECT_EQ(io::loglog_svg(f), io::loglog_svg(f));
  EXPECT_NE(io::loglog_svg(f).find("box dimension"), std::string::npos);
}
