#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;  // stdout and stderr together
};

Run run(const std::string& args) {
  const std::string cmd = std::string(CSC_CLI_PATH) + " " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), static_cast<int>(buf.size()), pipe)) r.out += buf.data();
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  fs::path dir;
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("csc_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }

  void make_graph(const std::string& name = "g.txt") {
    auto r = run("sbm-gen --n 300 --k 3 --s 12 --seed 4 --output " + path(name));
    ASSERT_EQ(r.code, 0) << r.out;
  }
};

}  // namespace

TEST_F(Cli, GenerateThenCluster) {
  make_graph();
  EXPECT_TRUE(fs::exists(path("g.txt.labels.csv")));
  auto r = run("cluster --input " + path("g.txt") + " --k 3 --seed 1 --truth " + path("g.txt.labels.csv") +
               " --output " + path("labels.csv"));
  ASSERT_EQ(r.code, 0) << r.out;
  auto diag = nlohmann::json::parse(slurp(path("labels.csv.diagnostics.json")));
  EXPECT_EQ(diag["method"], "csc");
  EXPECT_GT(diag["ari"].get<double>(), 0.8);
  EXPECT_TRUE(diag.contains("modularity"));
  EXPECT_FALSE(diag.contains("timings"));
}

TEST_F(Cli, SameSeedHashEqualOutputs) {
  make_graph();
  make_graph("g2.txt");
  EXPECT_EQ(slurp(path("g.txt")), slurp(path("g2.txt")));
  for (const char* out : {"a.json", "b.json"}) {
    auto r = run("cluster --input " + path("g.txt") + " --k 3 --seed 7 --format json --output " + path(out));
    ASSERT_EQ(r.code, 0) << r.out;
  }
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
}

TEST_F(Cli, RefusesToOverwriteWithoutForce) {
  make_graph();
  auto r = run("sbm-gen --n 300 --k 3 --s 12 --output " + path("g.txt"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("--force"), std::string::npos);
  r = run("sbm-gen --n 300 --k 3 --s 12 --force --output " + path("g.txt"));
  EXPECT_EQ(r.code, 0) << r.out;
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("cluster --input " + path("missing.txt") + " --output " + path("o.csv")).code, 4);
  EXPECT_EQ(run("cluster --bogus").code, 2);
  make_graph();
  EXPECT_EQ(run("cluster --input " + path("g.txt") + " --k 0 --output " + path("o.csv")).code, 2);
  EXPECT_EQ(run("cluster --input " + path("g.txt") + " --output " + path("nodir/o.csv")).code, 4);
  std::ofstream(path("bad.txt")) << "0 1\nnot an edge\n";
  auto r = run("cluster --input " + path("bad.txt") + " --output " + path("o2.csv"));
  EXPECT_EQ(r.code, 4);
  auto err = nlohmann::json::parse(r.out.substr(r.out.find('{')));
  EXPECT_EQ(err["exit_code"], 4);
  EXPECT_EQ(err["error"]["type"], "parse");
}

TEST_F(Cli, ExactBaselineRespectsCap) {
  make_graph();
  auto r = run("cluster --method sc --eig-cap 100 --k 3 --input " + path("g.txt") + " --output " + path("o.csv"));
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.out.find("capped at 100"), std::string::npos);
  r = run("cluster --method sc --k 3 --input " + path("g.txt") + " --output " + path("o.csv"));
  EXPECT_EQ(r.code, 0) << r.out;
}

TEST_F(Cli, HelpDocumentsDefaults) {
  auto r = run("cluster --help");
  EXPECT_EQ(r.code, 0);
  for (const char* s : {"n = 2k log k", "d = 4 log n", "p = 50", "gamma = 1e-3"}) EXPECT_NE(r.out.find(s), std::string::npos) << s;
  r = run("bench --help");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("n = 2k log k"), std::string::npos);
  r = run("sbm-gen --help");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("1000"), std::string::npos);
}

TEST_F(Cli, BenchWritesAndResumes) {
  std::ofstream(path("spec.json")) << R"({"num_nodes": 200, "k": 4, "avg_degree": 10, "epsilons": [0.02],
                                         "methods": ["csc"], "replicates": 2, "seed": 1})";
  auto r = run("bench --spec " + path("spec.json") + " --output " + path("sweep.csv"));
  ASSERT_EQ(r.code, 0) << r.out;
  const auto first = slurp(path("sweep.csv"));
  r = run("bench --resume --spec " + path("spec.json") + " --output " + path("sweep.csv"));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(slurp(path("sweep.csv")), first);
  EXPECT_EQ(run("bench --spec " + path("spec.json") + " --output " + path("sweep.csv")).code, 2);
}
