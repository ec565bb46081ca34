#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "scomma/driver.hpp"

using namespace scomma;
using namespace scomma::testing;
namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("scomma_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::string& args, std::string* out = nullptr, bool merge_stderr = true) {
    std::string cmd = "cd '" + source_dir() + "' && '" + cli_path() + "' " + args;
    if (merge_stderr) cmd += " 2>&1";
    return run_command(cmd, out);
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  void write(const std::string& name, const std::string& text) const { std::ofstream(dir_ / name) << text; }

  fs::path dir_;
};

TEST_F(Cli, CompileEmitFlatToStdout) {
  std::string out;
  ASSERT_EQ(run("compile corpus/stable/StableMarriage.scm --emit-flat", &out), 0);
  EXPECT_NE(out.find("  womenList man_wife[5] in [1,5];\n  menList woman_husband[5] in [1,5];\n"), std::string::npos);
}

TEST_F(Cli, CompileTargetIntoDirectory) {
  ASSERT_EQ(run("compile corpus/stable/StableMarriage.scm -t gecodej -o " + path("")), 0);
  EXPECT_TRUE(fs::exists(dir_ / "StableMarriage.java"));
  ASSERT_EQ(run("compile corpus/send/Send.scm -t clp -o " + path("send.ecl")), 0);
  EXPECT_EQ(read_file(path("send.ecl")).rfind(":- lib(ic).", 0), 0u);
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run("compile corpus/stable/StableMarriage.scm"), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  write("Bad.scm", "import Nope.dat;\nclass A { int x in [1,2]; }\n");
  std::string out;
  EXPECT_EQ(run("compile " + path("Bad.scm") + " --emit-flat", &out), 1);
  EXPECT_NE(out.find("Nope.dat"), std::string::npos);
  EXPECT_NE(out.find("Bad.scm:1:1: error:"), std::string::npos) << out;
  write("Inf.scm", "class A { int x in [1,1]; constraint c { x > 1; } }\n");
  EXPECT_EQ(run("solve " + path("Inf.scm")), 3);
  EXPECT_EQ(run("solve corpus/golfers/Golfers.scm", &out), 4);
  EXPECT_NE(out.find("set-of-int"), std::string::npos);
  EXPECT_NE(out.find("compile"), std::string::npos);
}

TEST_F(Cli, NoRewritesFailsOnSetMatrixForClp) {
  std::string out;
  EXPECT_EQ(run("compile corpus/golfers/Golfers.scm -t clp --no-rewrites", &out), 1);
  EXPECT_NE(out.find("decompose_set_matrix"), std::string::npos);
  EXPECT_EQ(run("compile corpus/golfers/Golfers.scm -t clp", &out, false), 0);
}

TEST_F(Cli, SolvePrintsEnumLabels) {
  std::string out;
  ASSERT_EQ(run("solve corpus/stable/StableMarriage.scm --stats", &out), 0);
  EXPECT_NE(out.find("man_wife = [Tracy, Helen, Wanda, Linda, Sally]"), std::string::npos) << out;
  EXPECT_NE(out.find("// nodes="), std::string::npos);
}

TEST_F(Cli, SolveAllSend) {
  std::string out;
  ASSERT_EQ(run("solve corpus/send/Send.scm --all", &out), 0);
  EXPECT_NE(out.find("v = [9, 5, 6, 7, 1, 0, 8, 2]"), std::string::npos);
  EXPECT_EQ(out.find("// solution 2"), std::string::npos);
}

TEST_F(Cli, SolveCheckRoundTrip) {
  std::string sol;
  ASSERT_EQ(run("solve corpus/stable/StableMarriage.scm", &sol, false), 0);
  write("s.sol", sol);
  std::string out;
  EXPECT_EQ(run("check corpus/stable/StableMarriage.scm " + path("s.sol"), &out), 0);
  EXPECT_NE(out.find("satisfied"), std::string::npos);

  std::string flipped = sol;
  auto at = flipped.find("Tracy, Helen");
  ASSERT_NE(at, std::string::npos);
  flipped.replace(at, 12, "Helen, Tracy");
  write("bad.sol", flipped);
  EXPECT_EQ(run("check corpus/stable/StableMarriage.scm " + path("bad.sol"), &out), 1);
  EXPECT_NE(out.find("woman_husband[man_wife[1]]=1"), std::string::npos) << out;
}

TEST_F(Cli, CheckEmptyModel) {
  write("E.scm", "class E { }\n");
  write("e.sol", "");
  EXPECT_EQ(run("check " + path("E.scm") + " " + path("e.sol")), 0);
}

TEST_F(Cli, OptimizationReportsObjective) {
  std::string out;
  ASSERT_EQ(run("solve corpus/production/Production.scm", &out), 0);
  EXPECT_NE(out.find("// objective = 60"), std::string::npos) << out;
}

TEST_F(Cli, TargetsAndTargetPath) {
  std::string out;
  ASSERT_EQ(run("targets", &out), 0);
  EXPECT_NE(out.find("gecodej"), std::string::npos);
  write("mini.bd", "backend mini; extension \".mini\"; template Problem : \"hello\\n\" ;\n");
  ASSERT_EQ(run("--target-path " + path("") + " targets", &out), 0);
  EXPECT_NE(out.find("mini"), std::string::npos);
  ASSERT_EQ(run_command("cd '" + source_dir() + "' && SCOMMA_TARGET_PATH='" + path("") + "' '" + cli_path() +
                            "' compile corpus/send/Send.scm -t mini",
                        &out),
            0);
  EXPECT_EQ(out, "hello\n");
}

TEST_F(Cli, BenchEmptyDirectory) {
  std::string out;
  EXPECT_EQ(run("bench " + path("") + " --jsonl " + path("r.jsonl"), &out), 0);
  EXPECT_TRUE(read_file(path("r.jsonl")).empty());
}

}  // namespace
