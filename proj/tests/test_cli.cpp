#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "porosity/report.hpp"

namespace fs = std::filesystem;
using porosity::json;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run run(const std::string& args) {
  std::string cmd = std::string(POROSITY_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  int st = pclose(pipe);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("porosity_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path file(const std::string& name, const std::string& content) {
    auto p = dir_ / name;
    std::ofstream(p) << content;
    return p;
  }
  fs::path dir_;
};

}  // namespace

TEST_F(Cli, ConstructThenClassifyDoubled) {
  auto spec = dir_ / "doubled.json";
  ASSERT_EQ(run("construct doubled --factor 2 --out " + spec.string()).status, 0);
  auto r = run("classify --set " + spec.string() + " --depth 32 --epsilon 1/4");
  ASSERT_EQ(r.status, 0);
  auto j = json::parse(r.out);
  EXPECT_EQ(j["csp"]["verdict"], "csp");
  EXPECT_EQ(j["csp"]["M"], "2");
}

TEST_F(Cli, ConstructEmitsLoadableSpecs) {
  for (const char* args : {"ratio-vanishing", "doubled --factor 3", "prop28 --member union", "prop28 --member star",
                           "geometric --ratio 1/3"}) {
    auto r = run(std::string("construct ") + args);
    ASSERT_EQ(r.status, 0) << args;
    EXPECT_NO_THROW((void)porosity::make_set(porosity::spec_from_json(json::parse(r.out)))) << args;
  }
  EXPECT_EQ(run("construct doubled --factor 1").status, 2);
  EXPECT_EQ(run("construct nonsense").status, 2);
}

TEST_F(Cli, AnalyzeIsByteIdenticalAcrossRuns) {
  auto spec = file("w.json", R"({"kind":"super-geometric","params":{}})");
  auto a = dir_ / "a.json", b = dir_ / "b.json", plot = dir_ / "p.tsv";
  ASSERT_EQ(run("analyze --set " + spec.string() + " --depth 16 --out " + a.string()).status, 0);
  ASSERT_EQ(run("analyze --set " + spec.string() + " --depth 16 --out " + b.string() + " --plot " + plot.string()).status,
            0);
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_FALSE(slurp(a).empty());
  EXPECT_EQ(slurp(plot).rfind("h\tlambda_over_h", 0), 0u);
  auto j = json::parse(slurp(a));
  EXPECT_FALSE(j.contains("timings"));
  EXPECT_EQ(j["csp"]["verdict"], "csp");
}

TEST_F(Cli, InvalidInputExitsTwo) {
  EXPECT_EQ(run("classify --set " + (dir_ / "missing.json").string()).status, 2);
  EXPECT_EQ(run("classify --set " + file("bad.json", "{not json").string()).status, 2);
  EXPECT_EQ(run("classify --set " + file("q.json", R"({"kind":"geometric","params":{"ratio":"3/2"}})").string()).status,
            2);
  EXPECT_EQ(run("analyze --set " + file("g.json", R"({"kind":"geometric","params":{"ratio":"1/2"}})").string() +
                " --epsilon 2")
                .status,
            2);
  EXPECT_EQ(run("bogus").status, 2);
}

TEST_F(Cli, BitBudgetExitsThree) {
  auto spec = file("w.json", R"({"kind":"super-geometric","params":{}})");
  EXPECT_EQ(run("analyze --set " + spec.string() + " --bits 64 --depth 24").status, 3);
}

TEST_F(Cli, VerifySuitePasses) {
  auto r = run("verify --suite geometric");
  EXPECT_EQ(r.status, 0);
  auto j = json::parse(r.out);
  ASSERT_TRUE(j.contains("checks"));
  for (const auto& c : j["checks"]) EXPECT_TRUE(c["passed"].get<bool>());
  EXPECT_EQ(run("verify --suite nope").status, 2);
}
