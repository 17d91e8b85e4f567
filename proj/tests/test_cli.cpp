#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(SCHEDSEQ_CLI) + " " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string data(const std::string& name) { return std::string(SCHEDSEQ_TEST_DATA) + "/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("schedseq_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

}  // namespace

TEST_F(Cli, GenerateReportsChosenParameters) {
  auto r = run("generate --K 18 --M 3 --out " + path("s.json"));
  ASSERT_EQ(r.code, 0);
  auto j = json::parse(r.out);
  EXPECT_EQ(j["W"], 3);
  EXPECT_EQ(j["L"], 546);
  EXPECT_EQ(j["Mprime"], 4);
  EXPECT_TRUE(j.contains("lower_bound"));
  EXPECT_EQ(json::parse(slurp(path("s.json")))["L"], 546);

  r = run("generate --K 24 --M 3 --out " + path("t.json"));
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(json::parse(r.out)["L"], 1122);
}

TEST_F(Cli, GenerateSingleChannel) {
  const auto r = run("generate --K 3 --M 1 --out " + path("s.json"));
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(json::parse(r.out)["L"], 15);
  const auto seqs = json::parse(slurp(path("s.json")))["sequences"];
  ASSERT_EQ(seqs.size(), 3u);
  const std::vector<std::vector<int>> ones{{0, 1, 2}, {0, 7, 11}, {0, 6, 12}};
  for (std::size_t i = 0; i < 3; ++i)
    for (int t = 0; t < 15; ++t) {
      const bool one = std::find(ones[i].begin(), ones[i].end(), t) != ones[i].end();
      EXPECT_EQ(seqs[i][static_cast<std::size_t>(t)], one ? "T1" : "R1");
    }
}

TEST_F(Cli, GenerateRejectsInvalidParameters) {
  EXPECT_NE(run("generate --K 2 --M 3 --out " + path("s.json")).code, 0);
  EXPECT_NE(run("generate --K 4 --M 2 --W 3 --out " + path("s.json")).code, 0);
  EXPECT_NE(run("generate --K 4").code, 0);
}

TEST_F(Cli, VerifyExitCodes) {
  EXPECT_EQ(run("verify --in " + data("set_2_3_12.json") + " --mode exhaustive").code, 0);
  EXPECT_EQ(run("verify --in " + data("corrupt_channel.json") + " --mode exhaustive").code, 1);
  EXPECT_EQ(run("verify --in " + path("nope.json")).code, 1);

  ASSERT_EQ(run("generate --K 4 --M 2 --W 2 --out " + path("k4.json")).code, 0);
  const auto r = run("verify --in " + path("k4.json") + " --mode exhaustive");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(json::parse(r.out)["verdict"], "Proven");
  EXPECT_EQ(run("verify --in " + path("k4.json") + " --mode conservative").code, 0);
  EXPECT_EQ(run("verify --in " + path("k4.json") + " --mode randomized --samples 200").code, 3);
  EXPECT_EQ(run("verify --in " + path("k4.json") + " --mode exhaustive --budget 10").code, 3);
}

TEST_F(Cli, VerifyWitnessExit) {
  auto j = json::parse(slurp(data("set_2_3_12.json")));
  for (auto& s : j["sequences"][2]) s = "T2";
  std::ofstream(path("deaf.json")) << j.dump();
  const auto r = run("verify --in " + path("deaf.json") + " --mode exhaustive");
  EXPECT_EQ(r.code, 2);
  const auto report = json::parse(r.out);
  EXPECT_EQ(report["witness"]["transmitter"], 1);
  EXPECT_EQ(report["witness"]["receiver"], 3);
}

TEST_F(Cli, Bound) {
  auto r = run("bound --K 70 --M 4 --ratio");
  ASSERT_EQ(r.code, 0);
  auto j = json::parse(r.out);
  EXPECT_EQ(j["combined"], 857);
  EXPECT_EQ(j["L"], 5624);
  EXPECT_DOUBLE_EQ(j["ratio"].get<double>(), 6.56);
  EXPECT_EQ(j["schema"], "schedseq.bound/1");

  r = run("bound --K 5 --M 5");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(json::parse(r.out)["combined"], 16);

  r = run("bound --K 60 --M 3 --ratio");
  ASSERT_EQ(r.code, 0);
  EXPECT_DOUBLE_EQ(json::parse(r.out)["ratio"].get<double>(), 6.18);
}

TEST_F(Cli, FrameLength) {
  auto r = run("framelen --K 15");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(json::parse(r.out)["L_rand"], 656);

  r = run("framelen --K 10 --cdf-at 209");
  ASSERT_EQ(r.code, 0);
  EXPECT_NEAR(json::parse(r.out)["cdf_at"]["cdf"].get<double>(), 0.9769, 1e-4);

  r = run("framelen --K 2 --target 0.5");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(json::parse(r.out)["L_rand"], 5);
}

TEST_F(Cli, SimulateSequenceSetWithinPeriod) {
  ASSERT_EQ(run("generate --K 18 --M 3 --out " + path("s.json")).code, 0);
  const auto r = run("simulate --in " + path("s.json") + " --runs 2000 --seed 1 --out " + path("a.csv") + " --summary " +
                     path("a.json"));
  ASSERT_EQ(r.code, 0);
  std::ifstream csv(path("a.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "run_index,completion_time,censored");
  int rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    EXPECT_LE(std::stoi(line.substr(c1 + 1, c2 - c1 - 1)), 546);
    EXPECT_EQ(line.substr(c2 + 1), "0");
  }
  EXPECT_EQ(rows, 2000);
  EXPECT_EQ(json::parse(slurp(path("a.json")))["runs"], 2000);
}

TEST_F(Cli, SimulateIsByteIdentical) {
  ASSERT_EQ(run("simulate --random --K 10 --W 2 --runs 300 --seed 9 --out " + path("a.csv")).code, 0);
  ASSERT_EQ(run("simulate --random --K 10 --W 2 --runs 300 --seed 9 --threads 1 --out " + path("b.csv")).code, 0);
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
  ASSERT_EQ(run("simulate --random --K 10 --W 2 --runs 300 --seed 10 --out " + path("c.csv")).code, 0);
  EXPECT_NE(slurp(path("a.csv")), slurp(path("c.csv")));
}

TEST_F(Cli, SimulateRandomFrameLength) {
  // P(X <= 812) for K = 18 on one channel should sit near 0.99999.
  const auto r = run("simulate --random --K 18 --W 1 --runs 10000 --seed 0 --out " + path("r.csv"));
  ASSERT_EQ(r.code, 0);
  std::ifstream csv(path("r.csv"));
  std::string line;
  std::getline(csv, line);
  int total = 0, within = 0;
  while (std::getline(csv, line)) {
    ++total;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    if (line.substr(c2 + 1) == "0" && std::stoi(line.substr(c1 + 1, c2 - c1 - 1)) <= 812) ++within;
  }
  ASSERT_EQ(total, 10000);
  const double p = 0.99999;
  const double sigma = std::sqrt(p * (1 - p) / total);
  EXPECT_LE(std::abs(static_cast<double>(within) / total - p), 3 * sigma + 1.0 / total);
}

TEST_F(Cli, SimulateNeedsASource) {
  EXPECT_NE(run("simulate --runs 10 --out " + path("x.csv")).code, 0);
  EXPECT_NE(run("simulate --in a --random --K 5 --out " + path("x.csv")).code, 0);
}
