#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "delone/io.hpp"

namespace fs = std::filesystem;
using delone::json;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    std::random_device rd;
    dir_ = fs::temp_directory_path() / ("delone_cli_" + std::to_string(rd()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path path(const std::string& name) const { return dir_ / name; }

  void write(const std::string& name, const std::string& text) const { std::ofstream(path(name)) << text; }

  std::string slurp(const std::string& name) const {
    std::ifstream in(path(name), std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  // Runs the binary with stderr captured to err.txt; returns the exit status.
  int run(const std::string& args) const {
    std::string cmd = std::string(DELONE_CLI) + " " + args + " 2>" + path("err.txt").string();
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  void write_config(const std::string& name, const std::string& levels, const std::string& window) const {
    write(name, R"({"density": {"variant": "trig", "k": 1, "a": "1/9"}, "levels": )" + levels +
                    R"(, "window": )" + window + "}");
  }

  fs::path dir_;
};

const std::string kSquarePts = "# delone-v1 d=2 denom=1\n0 0\n1 0\n0 1\n1 1\n";
const std::string kRowPts = "# delone-v1 d=2 denom=1\n0 0\n1 0\n2 0\n3 0\n";

}  // namespace

TEST_F(Cli, MatchIdentity) {
  write("a.pts", kSquarePts);
  ASSERT_EQ(run("match --source " + path("a.pts").string() + " --target " + path("a.pts").string() + " --out " +
                path("m.json").string()),
            0);
  auto j = json::parse(slurp("m.json"));
  EXPECT_EQ(j["L_star"], "1/1");
  EXPECT_EQ(j["optimal"], true);
  EXPECT_TRUE(fs::exists(path("m.json.manifest.json")));
}

TEST_F(Cli, MatchSquareOntoRowWithOracle) {
  write("a.pts", kSquarePts);
  write("b.pts", kRowPts);
  ASSERT_EQ(run("match --source " + path("a.pts").string() + " --target " + path("b.pts").string() +
                " --oracle --out " + path("m.json").string()),
            0);
  auto j = json::parse(slurp("m.json"));
  EXPECT_EQ(j["L_star"], "3/1");
  EXPECT_EQ(j["oracle"]["agree"], true);
}

TEST_F(Cli, BruteForceRefusesOversizedInstances) {
  std::string pts = "# delone-v1 d=2 denom=1\n";
  for (int i = 0; i < 12; ++i) pts += std::to_string(i) + " 0\n";
  write("big.pts", pts);
  EXPECT_EQ(run("match --method brute --source " + path("big.pts").string() + " --target " +
                path("big.pts").string()),
            2);
  EXPECT_NE(slurp("err.txt").find("CapacityError"), std::string::npos);
}

TEST_F(Cli, BuildRejectsIndivisibleSchedule) {
  write_config("cfg.json", R"([{"l": 32, "m": 2, "anchor": [0, 0]}, {"l": 48, "m": 2, "anchor": [64, 0]}])",
               R"({"center": [0, 0], "radius": 10})");
  EXPECT_EQ(run("build --config " + path("cfg.json").string() + " --out " + path("d.pts").string()), 2);
  auto err = slurp("err.txt");
  EXPECT_NE(err.find("level 1"), std::string::npos) << err;
  EXPECT_NE(err.find("32 ∤ 48"), std::string::npos) << err;
}

TEST_F(Cli, BuildAuditAndReplay) {
  write_config("cfg.json", R"([{"l": 32, "m": 2, "anchor": [0, 0]}])", R"({"center": [16, 16], "radius": 20})");
  ASSERT_EQ(run("build --config " + path("cfg.json").string() + " --out " + path("d.pts").string()), 0);
  auto audit = json::parse(slurp("d.pts.audit.json"));
  EXPECT_EQ(audit["clean"], true);
  EXPECT_EQ(audit["constants"]["separation"], "1/1");
  auto manifest = json::parse(slurp("d.pts.manifest.json"));
  EXPECT_EQ(manifest["command"], "build");

  ASSERT_EQ(run("build --config " + path("cfg.json").string() + " --out " + path("e.pts").string()), 0);
  EXPECT_EQ(slurp("d.pts"), slurp("e.pts"));

  EXPECT_EQ(run("audit --config " + path("cfg.json").string() + " --in " + path("d.pts").string() + " --out " +
                path("a.json").string()),
            0);

  // Drop one point: the replayed audit must flag it.
  auto text = slurp("d.pts");
  auto cut = text.find("\n6 6\n");
  ASSERT_NE(cut, std::string::npos);
  text.erase(cut + 1, 4);
  write("broken.pts", text);
  EXPECT_EQ(run("audit --config " + path("cfg.json").string() + " --in " + path("broken.pts").string() + " --out " +
                path("b.json").string()),
            1);
}

TEST_F(Cli, MeasuresAndReport) {
  write_config("cfg.json", R"([{"l": 32, "m": 2, "anchor": [0, 0]}, {"l": 64, "m": 4, "anchor": [64, 0]}])",
               R"({"center": [64, 32], "radius": 66})");
  ASSERT_EQ(run("measures --config " + path("cfg.json").string() + " --family cells --out " +
                path("m.json").string()),
            0);
  auto m = json::parse(slurp("m.json"));
  ASSERT_EQ(m["levels"].size(), 2u);
  EXPECT_EQ(m["levels"][1]["l"], 64);
  EXPECT_TRUE(m["mass_loss"].contains("normalized_mass"));

  ASSERT_EQ(run("measures --config " + path("cfg.json").string() + " --format csv --out " +
                path("m.csv").string()),
            0);
  EXPECT_TRUE(slurp("m.csv").starts_with("level,rect_id,mu,nu,integral,abs_error\n"));
  EXPECT_TRUE(fs::exists(path("m.csv.summary.json")));

  ASSERT_EQ(run("report --config " + path("cfg.json").string() + " --out " + path("r.json").string()), 0);
  auto r = json::parse(slurp("r.json"));
  EXPECT_EQ(r["audit_clean"], true);
  EXPECT_EQ(r["density_range"], json::array({"8/9", "1/1"}));

  EXPECT_EQ(run("measures --config " + path("cfg.json").string() + " --family hexagons"), 2);
}

TEST_F(Cli, AnalyzeSwapMap) {
  std::string map = "# map-v1 denom_src=1 denom_tgt=1\n";
  for (int x = -2; x <= 2; ++x)
    for (int y = -2; y <= 2; ++y) {
      int u = x, v = y;
      if (x == 0 && y == 0) u = 1;
      else if (x == 1 && y == 0) u = 0;
      map += std::to_string(x) + " " + std::to_string(y) + " " + std::to_string(u) + " " + std::to_string(v) + "\n";
    }
  write("f.map", map);
  ASSERT_EQ(run("analyze --map " + path("f.map").string() + " --stats lipschitz,co_uniformity --radii 1 --out " +
                path("a.json").string()),
            0);
  auto j = json::parse(slurp("a.json"));
  EXPECT_EQ(j["lipschitz"]["L"], "2/1");
  EXPECT_EQ(j["co_uniformity"]["samples"][0]["omega"], "2/1");
  EXPECT_EQ(run("analyze --map " + path("f.map").string() + " --stats curvature"), 2);
}

TEST_F(Cli, PlotPointsAndEmptySet) {
  write("a.pts", kSquarePts);
  ASSERT_EQ(run("plot --in " + path("a.pts").string() + " --out " + path("a.svg").string()), 0);
  auto svg = slurp("a.svg");
  std::size_t rects = 0;
  for (auto pos = svg.find("<rect"); pos != std::string::npos; pos = svg.find("<rect", pos + 1)) ++rects;
  EXPECT_EQ(rects, 4u);

  ASSERT_EQ(run("plot --in " + path("a.pts").string() + " --out " + path("b.svg").string()), 0);
  EXPECT_EQ(svg, slurp("b.svg"));

  write("empty.pts", "# delone-v1 d=2 denom=1\n");
  ASSERT_EQ(run("plot --in " + path("empty.pts").string() + " --out " + path("e.svg").string()), 0);
  auto empty = slurp("e.svg");
  EXPECT_NE(empty.find("<svg"), std::string::npos);
  EXPECT_NE(empty.find("</svg>"), std::string::npos);
}

TEST_F(Cli, BadInputExitsTwo) {
  EXPECT_EQ(run("match --source " + path("missing.pts").string() + " --target " + path("missing.pts").string()), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("--help > /dev/null"), 0);
}
