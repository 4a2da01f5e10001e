#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <string>

#include "wom/bundled.hpp"
#include "wom/io.hpp"

namespace {

using nlohmann::json;

struct Invocation {
  int code = -1;
  std::string out;
};

Invocation womctl(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " \"" WOMCTL_PATH "\" " + args + " 2>&1";
  Invocation r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  while (size_t n = fread(buf.data(), 1, buf.size(), pipe)) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "womctl_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(Cli, DemoPrintsTheStaticCounts) {
  const Invocation r = womctl("demo static3");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("16384"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("consistent: yes"), std::string::npos) << r.out;
}

TEST(Cli, DelayMatrixOfTheStar) {
  const Invocation r = womctl("--json delays wom3");
  ASSERT_EQ(r.code, 0) << r.out;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["results"]["delays"], json::parse("[[0,1,1],[1,0,2],[1,2,0]]"));
  EXPECT_EQ(j["command"], "delays");
}

TEST(Cli, InstanceFileRoundTrip) {
  const auto path = scratch("d2.json");
  std::ofstream(path) << wom::io::instance_to_json(wom::bundled::d2()).dump(2);
  const Invocation r = womctl("--json solve " + path.string() + " --method prescription --agent 2");
  ASSERT_EQ(r.code, 0) << r.out;
  const json j = json::parse(r.out);
  EXPECT_NEAR(j["results"]["optimal_cost"].get<double>(), 1.74, 1e-9);
  EXPECT_EQ(j["results"]["agent"], 2);
  EXPECT_EQ(j["instance_digest"].get<std::string>().size(), 64u);
}

TEST(Cli, InvalidNetworkExitsWithValidationCode) {
  json doc = wom::io::instance_to_json(wom::bundled::d2());
  doc["network"]["links"] = json::array({{{"from", 1}, {"to", 2}, {"delay", 1}}});
  const auto path = scratch("dangling.json");
  std::ofstream(path) << doc.dump();
  const Invocation r = womctl("validate " + path.string());
  EXPECT_EQ(r.code, 3) << r.out;
  EXPECT_NE(r.out.find("NotStronglyConnected"), std::string::npos) << r.out;
}

TEST(Cli, MalformedDocumentExitsWithParseCode) {
  const auto path = scratch("broken.json");
  std::ofstream(path) << "{\"network\": ";
  EXPECT_EQ(womctl("validate " + path.string()).code, 1);
  EXPECT_EQ(womctl("validate no-such-instance").code, 1);
}

TEST(Cli, CapFromTheEnvironment) {
  const Invocation r = womctl("solve d2 --method brute", "WOMCTL_CAP=10");
  EXPECT_EQ(r.code, 2) << r.out;
  EXPECT_NE(r.out.find("CapExceeded"), std::string::npos) << r.out;
  EXPECT_EQ(womctl("solve d2 --method brute --cap 100000000", "WOMCTL_CAP=10").code, 0);
}

TEST(Cli, AgentFlagIsOnlyForPrescriptionSearch) {
  EXPECT_EQ(womctl("solve d2 --method brute --agent 1").code, 1);
  EXPECT_EQ(womctl("solve d2 --method prescription").code, 1);
  EXPECT_EQ(womctl("solve d2 --method prescription --agent 3").code, 1);
  EXPECT_EQ(womctl("solve d2 --method magic").code, 1);
}

TEST(Cli, ReportFileAndEmittedStrategy) {
  const auto report = scratch("report.json");
  const auto strategy = scratch("strategy.json");
  std::filesystem::remove(report);
  const Invocation r = womctl("--report " + report.string() + " solve d2-t2 --method common-info --emit-strategy " + strategy.string());
  ASSERT_EQ(r.code, 0) << r.out;
  json j;
  std::ifstream(report) >> j;
  EXPECT_EQ(j["command"], "solve");
  EXPECT_TRUE(j.contains("timings"));
  const double cost = j["results"]["optimal_cost"].get<double>();
  EXPECT_NEAR(cost, 2.544, 1e-9);

  const Invocation e = womctl("--json evaluate d2-t2 --strategy " + strategy.string());
  ASSERT_EQ(e.code, 0) << e.out;
  EXPECT_NEAR(json::parse(e.out)["results"]["expected_cost"].get<double>(), cost, 1e-12);

  const Invocation s = womctl("--json simulate d2-t2 --strategy " + strategy.string() + " --samples 20000 --seed 3");
  ASSERT_EQ(s.code, 0) << s.out;
  const json sj = json::parse(s.out)["results"];
  EXPECT_LE(std::abs(sj["expected_cost"].get<double>() - cost), 4 * sj["stderr"].get<double>());
}

TEST(Cli, CompareReportsCappedRows) {
  const Invocation r = womctl("--json compare d2-t2 --cap 5000");
  ASSERT_EQ(r.code, 0) << r.out;
  const json j = json::parse(r.out);
  bool capped = false;
  for (const auto& row : j["results"]["rows"]) capped |= row["status"] == "cap_exceeded";
  EXPECT_TRUE(capped);
}

TEST(Cli, SchemaListsEveryAgent) {
  const Invocation r = womctl("--json schema wom3 --time 1");
  ASSERT_EQ(r.code, 0) << r.out;
  const json j = json::parse(r.out);
  ASSERT_EQ(j["results"].size(), 3u);
  EXPECT_EQ(j["results"][0]["agent"], 1);
  EXPECT_EQ(j["results"][0]["time"], 1);
}
