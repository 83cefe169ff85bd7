#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "support.hpp"

namespace fs = std::filesystem;
using support::run;

namespace {

const std::string kCli = T2NAV_CLI;
const std::string kRoot = T2NAV_ROOT;
const std::string kData = kRoot + "/tests/data/";

std::string cli(const std::string& args) { return kCli + " " + args; }

std::vector<nlohmann::json> json_lines(const std::string& text) {
  std::vector<nlohmann::json> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(nlohmann::json::parse(line));
  return out;
}

}  // namespace

TEST(CliRun, CorridorMatchesGolden) {
  const auto r = run(cli("run --world " + kRoot + "/worlds/corridor.world --seed 1"));
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out, support::slurp(kData + "corridor_seed1.golden.jsonl"));
  EXPECT_EQ(nlohmann::json::parse(r.out).at("success"), 1);
}

TEST(CliRun, MissingWorldIsInputError) {
  EXPECT_EQ(run(cli("run --world " + kRoot + "/worlds/nope.world")).code, 1);
  EXPECT_EQ(run(cli("run --world " + kRoot + "/worlds/invalid/walled_off.world")).code, 1);
  EXPECT_EQ(run(cli("run --world " + kRoot + "/worlds/corridor.world --ablation everything")).code, 1);
}

TEST(CliRun, BaselineHasNoLoopDetections) {
  const auto r = run(cli("run --world " + kRoot + "/worlds/figure_eight.world --seed 1 --ablation baseline"));
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(nlohmann::json::parse(r.out).at("loop_detections"), 0);
  EXPECT_EQ(nlohmann::json::parse(r.out).at("ablation"), "baseline");
}

TEST(CliRun, TraceIsWritten) {
  const auto dir = support::scratch_dir("trace");
  const auto trace = dir / "trace.json";
  ASSERT_EQ(run(cli("run --world " + kRoot + "/worlds/ring.world --trace " + trace.string())).code, 0);
  const auto j = nlohmann::json::parse(support::slurp(trace));
  EXPECT_EQ(j.at("kind"), "trace");
  EXPECT_FALSE(j.at("trajectory").empty());
  ASSERT_EQ(run(cli("plot --input " + trace.string() + " --output " + (dir / "t.svg").string())).code, 0);
  EXPECT_NE(support::slurp(dir / "t.svg").find("<svg"), std::string::npos);
}

TEST(CliSweep, CardinalityAndDeterminism) {
  const auto dir = support::scratch_dir("sweep");
  fs::create_directories(dir / "worlds");
  fs::copy_file(kRoot + "/worlds/corridor.world", dir / "worlds/corridor.world");
  fs::copy_file(kRoot + "/worlds/corridor.objects.json", dir / "worlds/corridor.objects.json");
  const std::string base = "sweep --worlds " + (dir / "worlds").string() + " --seeds 1 --ablations full,baseline --out ";
  ASSERT_EQ(run(cli(base + (dir / "a.jsonl").string())).code, 0);
  ASSERT_EQ(run(cli(base + (dir / "b.jsonl").string() + " --jobs 3")).code, 0);
  const std::string a = support::slurp(dir / "a.jsonl");
  EXPECT_EQ(a, support::slurp(dir / "b.jsonl"));

  const auto recs = json_lines(a);
  int episodes = 0, summaries = 0;
  for (const auto& r : recs) {
    if (r.value("summary", false)) {
      ++summaries;
      EXPECT_LE(r.at("SPL").get<double>(), r.at("SR").get<double>());
    } else {
      ++episodes;
    }
  }
  EXPECT_EQ(episodes, 2);
  EXPECT_EQ(summaries, 2);
}

TEST(CliSweep, BadInputs) {
  const auto dir = support::scratch_dir("sweep_bad");
  EXPECT_EQ(run(cli("sweep --worlds " + (dir / "none").string() + " --out " + (dir / "x.jsonl").string())).code, 1);
  EXPECT_EQ(run(cli("sweep --worlds " + kRoot + "/worlds --seeds 5-2 --out " + (dir / "x.jsonl").string())).code, 1);
}

TEST(CliComputePd, Examples) {
  auto r = run(cli("compute-pd --trajectory " + kData + "collinear.csv"));
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "dim,birth,death\n");

  r = run(cli("compute-pd --trajectory " + kData + "circle.csv"));
  ASSERT_EQ(r.code, 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  int prominent = 0;
  while (std::getline(in, line)) {
    double dim = 0, b = 0, d = 0;
    ASSERT_EQ(std::sscanf(line.c_str(), "%lf,%lf,%lf", &dim, &b, &d), 3);
    if (d - b > 1.0) ++prominent;
  }
  EXPECT_EQ(prominent, 1);

  EXPECT_EQ(run(cli("compute-pd --trajectory " + kData + "nine_points.csv")).code, 1);
  EXPECT_EQ(run(cli("compute-pd --trajectory " + kData + "missing.csv")).code, 1);
}

TEST(CliCompare, DistancesOfFixtures) {
  const auto r = run(cli("compare-diagrams " + kData + "diagram_one.csv " + kData + "diagram_empty.csv"));
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j.at("wasserstein2").get<double>(), 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(j.at("combined").get<double>(),
              0.7 * j.at("wasserstein2").get<double>() + 0.3 * j.at("landscape_distance").get<double>(), 1e-12);
}

TEST(CliLandscape, WritesGrid) {
  const auto r = run(cli("landscape --diagram " + kData + "diagram_one.csv"));
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("t,value\n", 0), 0u);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 65);
}

TEST(CliPlot, Examples) {
  const auto dir = support::scratch_dir("plot");
  const auto empty = dir / "empty.svg", one = dir / "one.svg", again = dir / "again.svg";
  ASSERT_EQ(run(cli("plot --input " + kData + "diagram_empty.csv --output " + empty.string())).code, 0);
  const std::string e = support::slurp(empty);
  EXPECT_EQ(e.find("<circle"), std::string::npos);
  EXPECT_NE(e.find("<line"), std::string::npos);

  ASSERT_EQ(run(cli("plot --input " + kData + "diagram_one.csv --output " + one.string())).code, 0);
  ASSERT_EQ(run(cli("plot --input " + kData + "diagram_one.csv --output " + again.string())).code, 0);
  const std::string o = support::slurp(one);
  EXPECT_EQ(o, support::slurp(again));
  std::size_t circles = 0;
  for (std::size_t p = o.find("<circle"); p != std::string::npos; p = o.find("<circle", p + 1)) ++circles;
  EXPECT_EQ(circles, 1u);

  EXPECT_EQ(run(cli("plot --input " + kData + "unknown.txt --output " + (dir / "x.svg").string())).code, 1);
  ASSERT_EQ(run(cli("plot --input " + kData + "circle.csv --output " + (dir / "traj.svg").string())).code, 0);
}

TEST(CliExitCodes, Matrix) {
  EXPECT_EQ(run(cli("--help")).code, 0);
  EXPECT_EQ(run(cli("run --help")).code, 0);
  EXPECT_EQ(run(cli("frobnicate")).code, 1);
  EXPECT_EQ(run(cli("run --world")).code, 1);
  EXPECT_EQ(run(cli("run --world " + kRoot + "/worlds/corridor.world --bogus 3")).code, 1);
  EXPECT_EQ(run(cli("compute-pd")).code, 1);
  EXPECT_EQ(run(cli("run --world " + kRoot + "/worlds/corridor.world --config " + kData + "unknown.txt")).code, 1);
  EXPECT_EQ(run(cli("landscape --diagram " + kData + "circle.csv")).code, 1);
}
