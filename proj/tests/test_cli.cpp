#include "symcap/cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

using namespace symcap;

namespace {

RunConfig parse(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  apply_config(cfg, in);
  return cfg;
}

std::string scratch(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("symcap_cli_test_" + name)).string();
}

}  // namespace

TEST(Config, AppliesKeysAndComments) {
  const RunConfig cfg = parse("# header\nsuite = ledger\nn=4  # half-dimension\n\nwitness_r = 0.5\nsvg = false\n");
  EXPECT_EQ(cfg.suite, "ledger");
  EXPECT_EQ(cfg.n, 4);
  EXPECT_EQ(cfg.witness_r, 0.5);
  EXPECT_FALSE(cfg.svg);
  EXPECT_NO_THROW(cfg.validate());
}

TEST(Config, RejectsMalformedLines) {
  for (const char* bad : {"suite", "n = two", "n = 3.5", "grid = ", "colour = red", "svg = yes"})
    EXPECT_THROW(parse(bad), ConfigError) << bad;
}

TEST(Config, ValidateRejectsBadValues) {
  for (const char* bad : {"suite = nope", "n = 1", "levels = 3", "grid = 8", "flow_steps = 0", "witness_r = 1",
                          "area_tolerance = 0", "out = ", "phi_samples = -1"}) {
    RunConfig cfg;
    try {
      cfg = parse(bad);
    } catch (const ConfigError&) {
      continue;
    }
    EXPECT_THROW(cfg.validate(), ConfigError) << bad;
  }
}

TEST(Config, SuiteNamesIncludeAll) {
  const auto& names = suite_names();
  EXPECT_EQ(names.size(), 9u);
  EXPECT_EQ(names.back(), "all");
}

TEST(Report, DeterministicWithoutTimestamp) {
  RunConfig cfg;
  cfg.suite = "ledger";
  cfg.n = 4;
  cfg.svg = false;
  cfg.out = scratch("ledger");
  const auto a = report_json(cfg, run_suites(cfg), false).dump();
  const auto b = report_json(cfg, run_suites(cfg), false).dump();
  EXPECT_EQ(a, b);
  const auto j = nlohmann::json::parse(a);
  EXPECT_TRUE(j["pass"].get<bool>());
  EXPECT_FALSE(j.contains("timestamp"));
  EXPECT_EQ(j["suites"][0]["suite"], "ledger");
  EXPECT_TRUE(std::filesystem::exists(std::filesystem::path(cfg.out) / "ledger.csv"));
  std::filesystem::remove_all(cfg.out);
}

TEST(Report, TimestampWhenRequested) {
  RunConfig cfg;
  cfg.suite = "ledger";
  cfg.out = scratch("stamp");
  const auto j = report_json(cfg, run_suites(cfg), true);
  EXPECT_TRUE(j.contains("timestamp"));
  std::filesystem::remove_all(cfg.out);
}

TEST(RunSuite, ExitCodeAndLog) {
  RunConfig cfg;
  cfg.suite = "gcd-sweep";
  cfg.gcd_resolution = 2000;
  cfg.out = scratch("gcd");
  std::ostringstream log;
  EXPECT_EQ(run_suite(cfg, log), 0);
  EXPECT_NE(log.str().find("PASS gcd-sweep"), std::string::npos);
  EXPECT_EQ(log.str().find("FAIL"), std::string::npos);
  EXPECT_TRUE(std::filesystem::exists(std::filesystem::path(cfg.out) / "report.json"));
  EXPECT_TRUE(std::filesystem::exists(std::filesystem::path(cfg.out) / "gcd_sweep.svg"));
  std::filesystem::remove_all(cfg.out);
}

TEST(RunSuite, FailingCheckGivesExitOne) {
  RunConfig cfg;
  cfg.suite = "gcd-sweep";
  cfg.gcd_resolution = 2;
  cfg.svg = false;
  cfg.out = scratch("coarse");
  std::ostringstream log;
  EXPECT_EQ(run_suite(cfg, log), 1);
  EXPECT_NE(log.str().find("FAIL"), std::string::npos);
  std::filesystem::remove_all(cfg.out);
}

TEST(Suites, SpectrumPasses) {
  RunConfig cfg;
  cfg.suite = "spectrum";
  cfg.random_loops = 5;
  cfg.svg = false;
  cfg.out = scratch("spectrum");
  const auto reports = run_suites(cfg);
  ASSERT_EQ(reports.size(), 1u);
  for (const Check& c : reports[0].checks) EXPECT_TRUE(c.pass) << c.name << " = " << c.value;
  std::filesystem::remove_all(cfg.out);
}
