#include <bnis/bnis.hpp>

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <string>
#include <sys/wait.h>

namespace {

struct Result {
  int code;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(BNIS_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, ""};
  std::string out;
  char buf[4096];
  while (auto n = fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

const std::string kNet = std::string(BNIS_DATA_DIR) + "/figure1.net";
const std::string kCases = std::string(BNIS_DATA_DIR) + "/figure1.cases";

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "bnis_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

TEST(Cli, ExactPrintsPosteriorMarginals) {
  const auto r = run("exact --net " + kNet + " --cases " + kCases);
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("case_id,p_evidence,variable,state,probability\n", 0), 0u);
  EXPECT_NE(r.out.find(",A,a,0.103260869565217"), std::string::npos) << r.out;
}

TEST(Cli, FactorizeReportsTheAddedArc) {
  const auto r = run("factorize --net " + kNet + " --cases " + kCases + " --mode full --heuristic cptsize");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("# arc A -> B"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("parents B A"), std::string::npos) << r.out;
}

TEST(Cli, SampleIsSeedDeterministic) {
  const std::string args = "sample --net " + kNet + " --cases " + kCases + " --strategy icpt --samples 2000 --seed 4";
  const auto a = run(args), b = run(args);
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("1,A,a,"), std::string::npos);
}

TEST(Cli, GenRoundTripsThroughTheParser) {
  const auto r = run("gen --nodes 12 --seed 3");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(bnis::serialize_network(bnis::parse_network(r.out)), r.out);
}

TEST(Cli, DiagnoseEmitsOneRowPerPair) {
  const auto r = run("diagnose --net " + kNet + " --cases " + kCases);
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 3);
}

TEST(Cli, BenchWritesCsv) {
  const auto config = scratch("bench.json");
  const auto out = scratch("bench.csv");
  bnis::write_file(config.string(), "{\"network\": \"" + kNet + "\", \"cases\": \"" + kCases +
                                        "\", \"strategies\": [\"lw\", \"full\"], \"n_samples\": 300}");
  ASSERT_EQ(run("bench --config " + config.string() + " --out " + out.string()).code, 0);
  const auto csv = bnis::read_file(out.string());
  EXPECT_EQ(csv.rfind(bnis::kResultCsvHeader, 0), 0u);
  EXPECT_NE(csv.find("1,full,300,1,"), std::string::npos);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("exact --net /nonexistent.net").code, 1);
  EXPECT_EQ(run("sample --net " + kNet + " --cases " + kCases + " --strategy ais").code, 1);
  EXPECT_EQ(run("frobnicate").code, 1);
  const auto config = scratch("budget.json");
  bnis::write_file(config.string(), "{\"network\": \"" + kNet + "\", \"cases\": \"" + kCases +
                                        "\", \"strategies\": [\"lw\"], \"cell_budget\": 1}");
  EXPECT_EQ(run("bench --config " + config.string()).code, 2);
}

}  // namespace
