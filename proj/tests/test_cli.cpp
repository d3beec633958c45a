#include "miniworld/cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

using namespace miniworld;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

CliInvocation parse(std::initializer_list<std::string> args) {
  return parse_cli(std::vector<std::string>(args));
}

}  // namespace

TEST(ParseCli, RunDefaultsMatchPaperSettings) {
  const CliInvocation inv =
      parse({"run", "--mode", "evo-ss", "--map", "A", "--runs", "30", "--seed", "7"});
  ASSERT_TRUE(inv.run_plan.has_value());
  const ExperimentPlan& plan = *inv.run_plan;
  EXPECT_EQ(plan.modes, (std::vector<Mode>{Mode::EvoSS}));
  EXPECT_EQ(plan.maps, (std::vector<MapId>{MapId::A}));
  EXPECT_EQ(plan.runs, 30);
  EXPECT_EQ(plan.base_seed, 7u);
  EXPECT_EQ(plan.generations, 100);
  EXPECT_EQ(plan.steps, 5000);
  EXPECT_EQ(plan.population, 20);
  EXPECT_DOUBLE_EQ(plan.learning_rate, 0.01);
  EXPECT_DOUBLE_EQ(plan.mutation_rate, 0.05);
  EXPECT_FALSE(plan.no_bias);
}

TEST(ParseCli, ModeAndMapListsAreCanonicalised) {
  const CliInvocation inv = parse({"run", "--mode", "ss,evo", "--map", "d,b,B"});
  ASSERT_TRUE(inv.run_plan.has_value());
  EXPECT_EQ(inv.run_plan->modes, (std::vector<Mode>{Mode::Evo, Mode::SS}));
  EXPECT_EQ(inv.run_plan->maps, (std::vector<MapId>{MapId::B, MapId::D}));
}

TEST(ParseCli, DefaultsToFullSweep) {
  const CliInvocation inv = parse({"run"});
  ASSERT_TRUE(inv.run_plan.has_value());
  EXPECT_EQ(inv.run_plan->modes.size(), 3u);
  EXPECT_EQ(inv.run_plan->maps.size(), 4u);
  EXPECT_EQ(inv.run_plan->runs, 30);
}

TEST(ParseCli, UnknownMapIsUsageError) {
  EXPECT_THROW(parse({"run", "--mode", "evo", "--map", "E"}), UsageError);
}

TEST(ParseCli, UnknownModeIsUsageError) {
  EXPECT_THROW(parse({"run", "--mode", "lamarck"}), UsageError);
}

TEST(ParseCli, UnknownFlagIsRejected) {
  const CliInvocation inv = parse({"run", "--frobnicate"});
  EXPECT_TRUE(inv.done);
  EXPECT_NE(inv.exit_code, 0);
}

TEST(ParseCli, InvalidValuesRejected) {
  EXPECT_THROW(parse({"run", "--runs", "0"}), UsageError);
  EXPECT_THROW(parse({"run", "--mutation-rate", "1.5"}), UsageError);
  EXPECT_THROW(parse({"run", "--learning-rate", "0"}), UsageError);
  EXPECT_THROW(parse({"run", "--generations", "-3"}), UsageError);
}

TEST(ParseCli, ConfigFileSuppliesValues) {
  TempDir dir("miniworld_cli_cfg");
  const fs::path cfg = dir.path / "plan.cfg";
  {
    std::ofstream out(cfg);
    out << "# smoke plan\n";
    out << "mode = evo,ss\n";
    out << "map = C\n";
    out << "runs = 4\n";
    out << "generations = 7\n";
    out << "steps = 100\n";
    out << "seed = 99\n";
    out << "no-bias = true\n";
    out << "out = cfg_results\n";
    out << "format = json\n";
  }
  const CliInvocation inv = parse({"run", "--config", cfg.string()});
  ASSERT_TRUE(inv.run_plan.has_value());
  const ExperimentPlan& plan = *inv.run_plan;
  EXPECT_EQ(plan.modes, (std::vector<Mode>{Mode::Evo, Mode::SS}));
  EXPECT_EQ(plan.maps, (std::vector<MapId>{MapId::C}));
  EXPECT_EQ(plan.runs, 4);
  EXPECT_EQ(plan.generations, 7);
  EXPECT_EQ(plan.steps, 100);
  EXPECT_EQ(plan.base_seed, 99u);
  EXPECT_TRUE(plan.no_bias);
  EXPECT_EQ(plan.output_dir, fs::path("cfg_results"));
  EXPECT_EQ(plan.format, OutputFormat::Json);
}

TEST(ParseCli, FlagsOverrideConfigFile) {
  TempDir dir("miniworld_cli_cfg2");
  const fs::path cfg = dir.path / "plan.cfg";
  {
    std::ofstream out(cfg);
    out << "runs = 4\ngenerations = 7\nmap = C\n";
  }
  const CliInvocation inv =
      parse({"run", "--config", cfg.string(), "--runs", "9", "--map", "A"});
  ASSERT_TRUE(inv.run_plan.has_value());
  EXPECT_EQ(inv.run_plan->runs, 9);               // flag wins
  EXPECT_EQ(inv.run_plan->generations, 7);        // config fills the gap
  EXPECT_EQ(inv.run_plan->maps, (std::vector<MapId>{MapId::A}));
}

TEST(ParseCli, DefaultConfigFilePickedUpFromCwd) {
  TempDir dir("miniworld_cli_cwd");
  const fs::path previous = fs::current_path();
  fs::current_path(dir.path);
  {
    std::ofstream out(kDefaultConfigFile);
    out << "runs = 11\nmode = ss\n";
  }
  const CliInvocation inv = parse({"run"});
  fs::current_path(previous);
  ASSERT_TRUE(inv.run_plan.has_value());
  EXPECT_EQ(inv.run_plan->runs, 11);
  EXPECT_EQ(inv.run_plan->modes, (std::vector<Mode>{Mode::SS}));
}

TEST(ParseCli, UnknownConfigKeyRejected) {
  TempDir dir("miniworld_cli_cfg3");
  const fs::path cfg = dir.path / "plan.cfg";
  {
    std::ofstream out(cfg);
    out << "velocity = 3\n";
  }
  EXPECT_THROW(parse({"run", "--config", cfg.string()}), UsageError);
}

TEST(ParseCli, MissingSubcommandReported) {
  const CliInvocation inv = parse({});
  EXPECT_TRUE(inv.done);
  EXPECT_NE(inv.exit_code, 0);
}

TEST(ParseCli, TestStatsArgs) {
  const CliInvocation inv =
      parse({"test-stats", "a.csv", "b.csv", "--column", "mean_energy"});
  ASSERT_TRUE(inv.test_stats.has_value());
  EXPECT_EQ(inv.test_stats->csv_a, fs::path("a.csv"));
  EXPECT_EQ(inv.test_stats->csv_b, fs::path("b.csv"));
  EXPECT_EQ(inv.test_stats->column, "mean_energy");
  EXPECT_EQ(inv.test_stats->column_b, "mean_energy");
}

TEST(CliMain, EndToEndSmokeRunAndStats) {
  TempDir dir("miniworld_cli_e2e");
  const fs::path out_dir = dir.path / "results";
  const std::string out_str = out_dir.string();
  {
    const char* argv[] = {"miniworld", "run",     "--mode",  "evo,evo-ss",
                          "--map",     "A",       "--runs",  "3",
                          "--seed",    "5",       "--generations", "4",
                          "--steps",   "80",      "--jobs",  "2",
                          "--out",     out_str.c_str()};
    ASSERT_EQ(cli_main(static_cast<int>(std::size(argv)), argv), 0);
  }
  ASSERT_TRUE(fs::exists(out_dir / "results.csv"));
  ASSERT_TRUE(fs::exists(out_dir / "summary.json"));
  ASSERT_TRUE(fs::exists(out_dir / "plot_data.csv"));

  const std::string results = (out_dir / "results.csv").string();
  {
    const char* argv[] = {"miniworld", "test-stats", results.c_str(), results.c_str(),
                          "--column", "best_energy"};
    testing::internal::CaptureStdout();
    const int rc = cli_main(static_cast<int>(std::size(argv)), argv);
    const std::string out = testing::internal::GetCapturedStdout();
    EXPECT_EQ(rc, 0);
    EXPECT_NE(out.find("U = "), std::string::npos);
    EXPECT_NE(out.find("p = 1"), std::string::npos);  // identical columns
  }
}

TEST(CliMain, TestStatsMissingFileFails) {
  const char* argv[] = {"miniworld", "test-stats", "/nonexistent/a.csv",
                        "/nonexistent/b.csv"};
  EXPECT_EQ(cli_main(static_cast<int>(std::size(argv)), argv), 1);
}
