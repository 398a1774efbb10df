#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "polyspline/io.hpp"
#include "polyspline/spline.hpp"

using namespace polyspline;
namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("polyspline_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  /// Runs the binary with `args`; stdout and stderr go to files in the temp dir.
  int run(const std::string& args) const {
    const std::string cmd =
        std::string(POLYSPLINE_CLI) + " " + args + " >" + path("stdout.txt") + " 2>" + path("stderr.txt");
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string read(const std::string& name) const {
    std::ifstream in(path(name), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  void write(const std::string& name, const std::string& text) const { writeTextFile(path(name), text); }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, InterpSingleKnotGivesPhi) {
  write("in.csv", "r,value\n1,1\n");
  ASSERT_EQ(run("interp --k 2 -i " + path("in.csv") + " -o " + path("out.json")), 0) << read("stderr.txt");
  const auto doc = readJsonFile(path("out.json"));
  EXPECT_EQ(doc["schema_version"], kSchemaVersion);
  EXPECT_EQ(doc["command"], "interp");
  const auto s = splineFromJson<double>(doc["spline"]);
  for (double r : {0.2, 0.7, 1.0, 1.9, 6.0}) EXPECT_NEAR(s(r), phiK(2, r), 1e-14);
  EXPECT_TRUE(fs::exists(path("out.json.samples.csv")));
}

TEST_F(Cli, InterpTwoKnotsHasExactEndConditions) {
  write("in.csv", "1,1\n2,0\n");
  ASSERT_EQ(run("interp --k 1 -i " + path("in.csv") + " -o " + path("out.json")), 0) << read("stderr.txt");
  const auto doc = readJsonFile(path("out.json"));
  EXPECT_EQ(doc["diagnostics"]["end_condition_head"].get<double>(), 0.0);
  EXPECT_EQ(doc["diagnostics"]["end_condition_tail"].get<double>(), 0.0);
  EXPECT_LE(doc["diagnostics"]["interpolation_defect"].get<double>(), 1e-12);
}

TEST_F(Cli, OutputsAreDeterministic) {
  write("in.csv", "0.5,1\n1.2,-2\n2,0.25\n3.5,1\n");
  ASSERT_EQ(run("interp --k -3 -i " + path("in.csv") + " -o " + path("a.json")), 0);
  ASSERT_EQ(run("interp --k -3 -i " + path("in.csv") + " -o " + path("b.json")), 0);
  EXPECT_EQ(read("a.json"), read("b.json"));
  EXPECT_EQ(read("a.json.samples.csv"), read("b.json.samples.csv"));
  ASSERT_EQ(run("verify --seed 7 -o " + path("v1.json")), 0);
  ASSERT_EQ(run("verify --seed 7 -o " + path("v2.json")), 0);
  EXPECT_EQ(read("v1.json"), read("v2.json"));
}

TEST_F(Cli, EvalAndEnergy) {
  write("in.csv", "1,1\n");
  ASSERT_EQ(run("interp --k 2 -i " + path("in.csv") + " -o " + path("s.json")), 0);
  ASSERT_EQ(run("eval -i " + path("s.json") + " --at 0.5 2 --deriv 1 -o " + path("e.json")), 0);
  const auto e = readJsonFile(path("e.json"));
  ASSERT_EQ(e["points"].size(), 2u);
  EXPECT_NEAR(e["points"][0]["value"].get<double>(), 1.5 * 0.5 * 2.0 - 2.0 * std::pow(0.5, 3), 1e-14);
  ASSERT_EQ(run("energy -i " + path("s.json") + " -o " + path("en.json")), 0);
  const auto en = readJsonFile(path("en.json"));
  EXPECT_NEAR(en["result"]["energy"].get<double>(), 24.0, 1e-12);
  EXPECT_LE(en["result"]["relative_difference"].get<double>(), 1e-8);
}

TEST_F(Cli, VerifyDefaultPassesAndNotesKOne) {
  ASSERT_EQ(run("verify -o " + path("v.json")), 0) << read("v.json");
  EXPECT_TRUE(readJsonFile(path("v.json"))["pass"].get<bool>());
  ASSERT_EQ(run("verify --k 1 --instances 2 -o " + path("k1.json")), 0);
  const auto doc = readJsonFile(path("k1.json"));
  bool noted = false;
  for (const auto& c : doc["instances"][0]["checks"])
    if (c["name"] == "representation") noted = c.contains("note") && c["skipped"].get<bool>();
  EXPECT_TRUE(noted);
}

TEST_F(Cli, VerifyDetectsCorruptedTail) {
  write("in.csv", "1,1\n1.5,-0.5\n2.5,0.3\n");
  ASSERT_EQ(run("interp --k 2 -i " + path("in.csv") + " -o " + path("s.json")), 0);
  auto doc = readJsonFile(path("s.json"));
  auto& coeff = doc["spline"]["pieces"].back()["terms"][0]["coeff"];
  coeff = coeff.get<double>() * 1.01;
  writeJsonFile(path("bad.json"), doc);
  ASSERT_EQ(run("verify -i " + path("s.json") + " -o " + path("ok.json")), 0);
  EXPECT_EQ(run("verify -i " + path("bad.json") + " -o " + path("v.json")), 4);
  EXPECT_FALSE(readJsonFile(path("v.json"))["pass"].get<bool>());
}

TEST_F(Cli, ConvergeStudies) {
  ASSERT_EQ(run("converge --levels 3 -o " + path("c.json")), 0) << read("stderr.txt");
  const auto doc = readJsonFile(path("c.json"));
  EXPECT_EQ(doc["reports"].size(), 3u);
  EXPECT_TRUE(doc["within_bounds"].get<bool>());
  ASSERT_EQ(run("converge --datum zero --levels 2 -o " + path("z.json")), 0);
  for (const auto& r : readJsonFile(path("z.json"))["reports"]) {
    EXPECT_EQ(r["errLinf0"].get<double>(), 0.0);
    EXPECT_EQ(r["errL2_1"].get<double>(), 0.0);
  }
}

TEST_F(Cli, SurfaceStudyAndMeshRoundTrip) {
  ASSERT_EQ(run("surface --study --levels 2 -o " + path("study.json")), 0) << read("stderr.txt");
  EXPECT_TRUE(readJsonFile(path("study.json"))["within_bounds"].get<bool>());

  write("data.json",
        R"({"radii": [1, 2], "theta_samples": 8, "curves": [[1, 0, -1, 0, 1, 0, -1, 0], [2, 2.5, 2, 1.5, 2, 2.5, 2, 1.5]]})");
  ASSERT_EQ(run("surface -i " + path("data.json") + " -o " + path("surf.json") + " --mesh " + path("m1.csv") +
                " --mesh-r 5 --mesh-theta 7"),
            0)
      << read("stderr.txt");
  const auto doc = readJsonFile(path("surf.json"));
  EXPECT_LE(doc["diagnostics"]["max_sample_deviation"].get<double>(), 1e-12);
  ASSERT_EQ(run("mesh -i " + path("surf.json") + " -o " + path("m2.csv") + " --mesh-r 5 --mesh-theta 7"), 0);
  EXPECT_EQ(read("m1.csv"), read("m2.csv"));
}

TEST_F(Cli, InputErrorsExitTwo) {
  EXPECT_EQ(run("interp --k 2 -i " + path("missing.csv")), 2);
  write("in.csv", "1,1\n1,2\n");
  EXPECT_EQ(run("interp --k 2 -i " + path("in.csv")), 2);
  write("one.csv", "1,1\n");
  EXPECT_EQ(run("interp --k 0 -i " + path("one.csv")), 2);
  EXPECT_EQ(run("interp -i " + path("one.csv")), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("converge --datum nope"), 2);
  write("bad.json", "{");
  EXPECT_EQ(run("eval -i " + path("bad.json") + " --at 1"), 2);
  EXPECT_NE(read("stderr.txt").find("input error"), std::string::npos);
}
