// Copyright 2026 The evuniv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// End-to-end runs of the evuniv binary.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

using json = nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "evuniv_test_cli";
  std::filesystem::create_directories(dir);
  return dir / name;
}

Run run(const std::string& args, const std::string& env = "") {
  const auto err_path = scratch("stderr.txt").string();
  const std::string cmd = env + " \"" EVUNIV_CLI_PATH "\" " + args + " 2>\"" + err_path + "\"";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = slurp(err_path);
  return r;
}

std::string sample(const std::string& name) { return std::string("\"") + EVUNIV_SAMPLES_DIR + "/" + name + "\""; }

std::vector<json> json_lines(const std::string& text) {
  std::vector<json> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(json::parse(line));
  }
  return out;
}

}  // namespace

TEST(CliBound, Values) {
  const std::array<std::array<int, 4>, 3> cases{{{2, 2, 17, 257}, {2, 6, 81, 1281}, {3, 2, 82, 6562}}};
  for (const auto& c : cases) {
    const std::string dn = std::to_string(c[0]) + " " + std::to_string(c[1]);
    auto r = run("bound " + dn);
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, std::to_string(c[2]) + "\n");
    r = run("bound " + dn + " --ivanyos");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, std::to_string(c[3]) + "\n");
  }
  EXPECT_EQ(run("bound 1 2").code, 1);
  EXPECT_EQ(run("bound").code, 1);
}

TEST(CliAnalyze, CliffordBlocked) {
  const auto r = run("analyze " + sample("clifford2.json") + " --seed 3");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["verdict"]["kind"], "CliffordBlocked");
  EXPECT_TRUE(j["verdict"]["N"].is_null());
  EXPECT_EQ(j["bounds"]["new"], 17);
  EXPECT_EQ(j["bounds"]["ivanyos"], 257);
  EXPECT_EQ(j["seed"], 3);
  ASSERT_GE(j["per_N"].size(), 1u);
  EXPECT_EQ(j["per_N"][0]["moment"]["exact"], 2);
  EXPECT_EQ(j["per_N"][0]["clifford"], true);
  EXPECT_FALSE(j["verdict"]["caveats"].empty());
}

TEST(CliAnalyze, UniversalPair) {
  const auto r = run("analyze " + sample("ht1.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["verdict"]["kind"], "UniversalAt");
  EXPECT_EQ(j["verdict"]["N"], 1);
  EXPECT_EQ(j["per_N"][0]["moment"]["exact"], 2);
  EXPECT_EQ(j["per_N"][0]["probe"]["outcome"], "InfiniteLikely");
  EXPECT_EQ(j["per_N"][0]["verdict_at_N"], "UniversalAt");
  const auto& mc = j["per_N"][0]["monte_carlo"];
  ASSERT_TRUE(mc.is_object());
  EXPECT_LT(std::abs(mc["estimate"].get<double>() - 2.0), 3 * mc["std_error"].get<double>());
  EXPECT_EQ(j["input"]["sha256"].get<std::string>().size(), 64u);
  EXPECT_EQ(j["gate_set"]["labels"][0], "H");
}

TEST(CliAnalyze, DigestMatchesSha256sum) {
  const auto j = json::parse(run("analyze " + sample("pauli1.json") + " --mc-samples 0").out);
  FILE* p = popen(("sha256sum " + sample("pauli1.json") + " 2>/dev/null").c_str(), "r");
  ASSERT_NE(p, nullptr);
  std::array<char, 65> hex{};
  const std::size_t n = fread(hex.data(), 1, 64, p);
  pclose(p);
  if (n != 64) GTEST_SKIP() << "sha256sum not available";
  EXPECT_EQ(j["input"]["sha256"], std::string(hex.data(), 64));
  EXPECT_TRUE(j["per_N"][0]["monte_carlo"].is_null());
}

TEST(CliAnalyze, GarbageIsParseError) {
  const auto r = run("analyze " + sample("garbage.json"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("parse error"), std::string::npos) << r.err;
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(run("analyze /nonexistent/file.json").code, 1);
  EXPECT_EQ(run("analyze " + sample("clifford2.json") + " --n-max 1").code, 1);
}

TEST(CliAnalyze, NotDecidedExitsTwo) {
  const auto path = scratch("cp.json");
  std::ofstream(path) << R"({"d": 2, "n": 2, "gates": [{"label": "CP", "matrix": [)"
                      << R"([[1,0],[0,0],[0,0],[0,0]], [[0,0],[1,0],[0,0],[0,0]],)"
                      << R"([[0,0],[0,0],[1,0],[0,0]], [[0,0],[0,0],[0,0],[0.7648421872844885,0.644217687237691]]]}]})";
  const auto r = run("analyze \"" + path.string() + "\" --n-max 3 --mc-samples 0");
  EXPECT_EQ(r.code, 2) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["verdict"]["kind"], "NotDecided");
  EXPECT_NE(j["verdict"]["reason"].get<std::string>().find("resource-capped"), std::string::npos);
  EXPECT_EQ(j["per_N"].size(), 2u);
}

TEST(CliAnalyze, ReproducibleExceptTimings) {
  const std::string args = "analyze " + sample("clifford1.json") + " --seed 11 --mc-samples 2000";
  auto a = json::parse(run(args).out);
  auto b = json::parse(run(args).out);
  ASSERT_TRUE(a.contains("timings"));
  a.erase("timings");
  b.erase("timings");
  EXPECT_EQ(a.dump(2), b.dump(2));
  auto c = json::parse(run("analyze " + sample("clifford1.json") + " --seed 12 --mc-samples 2000").out);
  c.erase("timings");
  EXPECT_NE(a.dump(2), c.dump(2));
}

TEST(CliAnalyze, DenseThresholdFromEnvironment) {
  const auto r = run("moments " + sample("clifford2.json") + " 2 2 --exact", "EVUNIV_DENSE_THRESHOLD=8");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["moment"]["method"], "MatrixFree");
  EXPECT_EQ(j["moment"]["exact"], 2);
  EXPECT_EQ(run("bound 2 2", "EVUNIV_DENSE_THRESHOLD=lots").code, 1);
}

TEST(CliMoments, Examples) {
  auto r = run("moments " + sample("pauli1.json") + " 1 2 --exact");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["moment"]["exact"], 4);
  r = run("moments " + sample("clifford2.json") + " 2 2 --exact");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["moment"]["exact"], 2);
  r = run("moments " + sample("ht1.json") + " 1 2 --mc --mc-samples 20000 --seed 9");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto m = json::parse(r.out)["moment"];
  EXPECT_EQ(m["method"], "MonteCarlo");
  EXPECT_EQ(m["samples"], 20000);
  EXPECT_LT(std::abs(m["estimate"].get<double>() - 2.0), 3 * m["std_error"].get<double>());
  r = run("moments " + sample("ht1.json") + " 1 4 --exact");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["moment"]["exact"], 14);
  EXPECT_EQ(run("moments " + sample("ht1.json") + " 1 3 --exact").code, 1);
  EXPECT_EQ(run("moments " + sample("ht1.json") + " 1 2 --exact --mc").code, 1);
}

TEST(CliJeandel, BuildThenAnalyze) {
  const auto path = scratch("b2.json");
  const auto r = run("jeandel build 2 --out \"" + path.string() + "\"");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  const auto stdout_copy = run("jeandel build 2");
  EXPECT_EQ(stdout_copy.out, slurp(path.string()));
  const auto a = run("analyze \"" + path.string() + "\" --mc-samples 0");
  ASSERT_EQ(a.code, 0) << a.err;
  const auto j = json::parse(a.out);
  EXPECT_EQ(j["gate_set"]["n"], 4);
  EXPECT_EQ(j["gate_set"]["supplied"], 5);
  // Universal already at its own arity N = 4.
  EXPECT_EQ(j["verdict"]["kind"], "UniversalAt");
  EXPECT_EQ(j["verdict"]["N"], 4);
  EXPECT_EQ(j["per_N"][0]["verdict_at_N"], "UniversalAt");
}

TEST(CliJeandel, VerifyTwoPasses) {
  const auto r = run("jeandel verify 2");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_TRUE(j["passed"].get<bool>());
  EXPECT_TRUE(j["parity"]["all_odd"].get<bool>());
  EXPECT_TRUE(j["compile"]["all_ok"].get<bool>());
  EXPECT_EQ(j["compile"]["gates"].size(), 5u);
}

TEST(CliJeandel, BuildThreeThenVerifyReportsCounterexample) {
  const auto path = scratch("b3.json");
  ASSERT_EQ(run("jeandel build 3 --out \"" + path.string() + "\"").code, 0);
  const auto r = run("jeandel verify 3");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_FALSE(j["parity"]["all_odd"].get<bool>());
  EXPECT_EQ(j["parity"]["counterexample_q"], 1);
  EXPECT_EQ(j["parity"]["rows"][1]["binom"], 4);
  EXPECT_FALSE(j["compile"]["all_ok"].get<bool>());
  EXPECT_NE(r.err.find("binom(4,3) is even"), std::string::npos) << r.err;
  EXPECT_EQ(run("jeandel verify 1").code, 1);
}

TEST(CliJeandel, OmegaFile) {
  const auto path = scratch("omega.json");
  std::ofstream(path) << R"({"d": 2, "n": 2, "gates": [{"label": "CZ", "matrix": [)"
                      << R"([[1,0],[0,0],[0,0],[0,0]], [[0,0],[1,0],[0,0],[0,0]],)"
                      << R"([[0,0],[0,0],[1,0],[0,0]], [[0,0],[0,0],[0,0],[-1,0]]]}]})";
  const auto r = run("jeandel build 2 --omega \"" + path.string() + "\"");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  ASSERT_EQ(j["gates"].size(), 1u);
  EXPECT_EQ(j["gates"][0]["label"], "B2(CZ)");
  EXPECT_EQ(run("jeandel build 2 --omega " + sample("ht1.json")).code, 1);
}

TEST(CliDioph, Scans) {
  auto r = run("dioph lie-type");
  ASSERT_EQ(r.code, 0) << r.err;
  auto lines = json_lines(r.out);
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[0]["d"], 2);
  EXPECT_EQ(lines[1]["d"], 11);
  EXPECT_EQ(lines[1]["k"], 5);
  EXPECT_NE(r.err.find("verified within bounds"), std::string::npos);

  r = run("dioph repunit --sign minus");
  ASSERT_EQ(r.code, 0) << r.err;
  lines = json_lines(r.out);
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[2]["x"], 18);
  EXPECT_EQ(lines[2]["y"], 7);

  r = run("dioph repunit --sign plus --x-max 200 --n-max 15 --q-max 6");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(json_lines(r.out).empty());

  r = run("dioph cohn");
  ASSERT_EQ(r.code, 0) << r.err;
  lines = json_lines(r.out);
  EXPECT_EQ(lines.size(), 63u);
  bool found = false;
  for (const auto& l : lines) found = found || (l["y"] == 239 && l["z"] == 13 && l["k"] == 4);
  EXPECT_TRUE(found);
  EXPECT_EQ(run("dioph repunit --sign sideways").code, 1);
}
