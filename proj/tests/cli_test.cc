#include "stabkit/cli.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "json.hpp"
#include "stabkit/bundled.h"
#include "stabkit/parallel.h"

namespace stabkit {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result Invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "stabkit");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("stabkit_cli_" + std::string(::testing::UnitTest::GetInstance()
                                             ->current_test_info()
                                             ->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

  fs::path dir_;
};

// Uniform damping so the modal branches apply; small enough that every
// analysis finishes in well under a second.
const char* kSmall = R"({
  "name": "small",
  "model": {
    "n": 16,
    "stiffness": {"variant": "wave_dirichlet", "shift": 0},
    "damping": {"variant": "viscous", "params": {"lo": 0, "hi": 1}},
    "A": [[1, 0], [0, 2]],
    "D": [[1, 2], [2, 4]]
  },
  "analyses": ["kalman", "spectrum", "resolvent", "branches", "decay"],
  "params": {
    "resolvent": {"beta_lo": 2, "beta_hi": 20, "grid": "uniform", "points": 12},
    "branches": {"example": "modal", "k_lo": 1, "k_hi": 10},
    "decay": {"dt": 0.05, "T": 0, "modes": 3}
  }
})";

TEST_F(CliTest, KalmanOnTheWavePair) {
  const std::string a = Write("A.json", "[[1, 0], [0, 2]]");
  const std::string d = Write("D.json", "{\"rows\": [[1, 2], [2, 4]]}");
  const Result r = Invoke({"kalman", "--A", a, "--D", d});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("kalman rank: 2 of 2"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("commutator |AD-DA|: 2\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("coercivity: 5 (verified)"), std::string::npos) << r.out;
}

TEST_F(CliTest, KalmanWritesJsonWhenAskedTo) {
  const std::string a = Write("A.json", "[[1, 0], [0, 2]]");
  const std::string d = Write("D.json", "[[1, 2], [2, 4]]");
  const std::string out = (dir_ / "k").string();
  fs::create_directories(out);
  ASSERT_EQ(Invoke({"kalman", "--A", a, "--D", d, "--out", out}).code, 0);
  const json k = json::parse(Slurp(fs::path(out) / "kalman.json"));
  EXPECT_EQ(k["kalman_rank"], 2);
  EXPECT_EQ(k["max_invariant_dim"], 0);
}

TEST_F(CliTest, RunWritesEveryArtifactWithItsHeader) {
  const std::string s = Write("small.json", kSmall);
  const fs::path out = dir_ / "run";
  const Result r = Invoke({"run", s, "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::pair<const char*, const char*> csvs[] = {
      {"spectrum.csv", "re,im,residual\n"},
      {"scan.csv", "beta,norm\n"},
      {"branches.csv", "index,re,im,pred_re,pred_im,rel_err\n"},
      {"decay.csv", "t,E,residual\n"},
  };
  for (const auto& [file, header] : csvs) {
    const std::string text = Slurp(out / file);
    EXPECT_EQ(text.rfind(header, 0), 0u) << file;
  }
  for (const char* file : {"kalman.json", "decay.json", "summary.json", "scan.svg",
                           "decay.svg"}) {
    EXPECT_TRUE(fs::exists(out / file)) << file;
  }
  const json summary = json::parse(Slurp(out / "summary.json"));
  EXPECT_EQ(summary["name"], "small");
  EXPECT_EQ(summary["spectrum"]["size"], 2 * 2 * 16);
}

TEST_F(CliTest, IdenticalRunsAreByteIdentical) {
  const std::string s = Write("small.json", kSmall);
  const fs::path a = dir_ / "a", b = dir_ / "b";
  ASSERT_EQ(Invoke({"run", s, "--out", a.string(), "--seed", "7", "--threads", "1"}).code, 0);
  ASSERT_EQ(Invoke({"run", s, "--out", b.string(), "--seed", "7", "--threads", "3"}).code, 0);
  for (const auto& entry : fs::directory_iterator(a)) {
    EXPECT_EQ(Slurp(entry.path()), Slurp(b / entry.path().filename()))
        << entry.path().filename();
  }
}

TEST_F(CliTest, EmptyAnalysesWriteNothing) {
  json doc = json::parse(kSmall);
  doc["analyses"] = json::array();
  const std::string s = Write("empty.json", doc.dump());
  const fs::path out = dir_ / "none";
  const Result r = Invoke({"run", s, "--out", out.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_FALSE(fs::exists(out));
}

TEST_F(CliTest, SchemaErrorsExitTwo) {
  json doc = json::parse(kSmall);
  doc["model"]["colour"] = "red";
  EXPECT_EQ(Invoke({"run", Write("bad.json", doc.dump())}).code, 2);
  doc = json::parse(kSmall);
  doc["analyses"] = {"everything"};
  EXPECT_EQ(Invoke({"run", Write("bad2.json", doc.dump())}).code, 2);
  EXPECT_EQ(Invoke({"run", Write("bad3.json", "{not json")}).code, 2);
  EXPECT_EQ(Invoke({"run", (dir_ / "missing.json").string()}).code, 2);
  const std::string a = Write("A.json", "[[1, 0], [0, 2]]");
  const std::string d = Write("D.json", "[[1, 2], [3, 4]]");
  EXPECT_EQ(Invoke({"kalman", "--A", a, "--D", d}).code, 2);
}

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(Invoke({}).code, 2);
  EXPECT_EQ(Invoke({"frobnicate"}).code, 2);
  EXPECT_EQ(Invoke({"kalman", "--A", "x.json"}).code, 2);
  EXPECT_EQ(Invoke({"verify-example", "9.9"}).code, 2);
  EXPECT_EQ(Invoke({"--help"}).code, 0);
}

// The dense eigensolver refuses operators above its size guard.
TEST_F(CliTest, NumericalFailureExitsThree) {
  json doc = json::parse(kSmall);
  doc["model"]["n"] = 1001;
  doc["analyses"] = {"spectrum"};
  const Result r = Invoke({"run", Write("big.json", doc.dump()), "--out", (dir_ / "o").string()});
  EXPECT_EQ(r.code, 3) << r.err;
}

TEST_F(CliTest, VerifyExampleViscousPasses) {
  const Result r = Invoke({"verify-example", "5.1"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
}

TEST_F(CliTest, VerifyExampleKelvinVoigtPasses) {
  const Result r = Invoke({"verify-example", "5.2"});
  EXPECT_EQ(r.code, 0) << r.out;
}

// The tip checks include the quoted expansion, which the computed branch does
// not follow; the failure is reported through exit code 1.
TEST_F(CliTest, VerifyExampleTipReportsEachCheck) {
  const Result r = Invoke({"verify-example", "5.3"});
  EXPECT_EQ(r.code == 0, r.out.find("FAIL") == std::string::npos);
  EXPECT_NE(r.out.find("Re beta < 0: PASS"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("|f(beta)| <= 1e-10 scale: PASS"), std::string::npos) << r.out;
}

TEST(BundledTest, MatchesTheScenarioFiles) {
  const fs::path root = fs::path(STABKIT_SOURCE_DIR) / "scenarios";
  int files = 0;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.path().extension() != ".json") continue;
    ++files;
    const std::string name = entry.path().stem().string();
    EXPECT_EQ(json::parse(BundledScenarioJson(name)), json::parse(Slurp(entry.path())))
        << name;
  }
  EXPECT_EQ(files, static_cast<int>(BundledScenarios().size()));
  EXPECT_THROW(BundledScenarioJson("nope"), std::out_of_range);
}

TEST_F(CliTest, BundledNameRunsWithoutAFile) {
  const fs::path out = dir_ / "b";
  const Result r = Invoke({"run", "ex51", "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(out / "branches.csv"));
}

TEST(ThreadsTest, ExplicitRequestWinsOverTheEnvironment) {
  ::setenv("STABKIT_THREADS", "3", 1);
  EXPECT_EQ(ResolveThreads(0), 3);
  EXPECT_EQ(ResolveThreads(2), 2);
  ::unsetenv("STABKIT_THREADS");
  EXPECT_GE(ResolveThreads(0), 1);
}

// The installed binary and the in-process entry point share exit codes.
TEST_F(CliTest, BinaryExitCodes) {
  const std::string cli = STABKIT_CLI;
  auto status = [&](const std::string& args) {
    const int raw = std::system((cli + " " + args + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(raw);
  };
  EXPECT_EQ(status("verify-example 5.1"), 0);
  EXPECT_EQ(status("verify-example 4.4"), 2);
  EXPECT_EQ(status("run " + Write("bad.json", "{\"name\": 1}")), 2);
}

}  // namespace
}  // namespace stabkit
