// Command-line front end: the `run` sweep subcommand and the `test-stats`
// rank-sum utility. Flag values override config-file values, which override
// the built-in defaults.
#pragma once

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "miniworld/experiment.hpp"

namespace miniworld {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline Mode parse_mode(const std::string& s) {
  if (s == "evo") return Mode::Evo;
  if (s == "evo-ss") return Mode::EvoSS;
  if (s == "ss") return Mode::SS;
  throw UsageError("unknown mode '" + s + "' (expected evo, evo-ss, ss)");
}

inline MapId parse_map(const std::string& s) {
  if (s.size() == 1) {
    switch (s[0]) {
      case 'A': case 'a': return MapId::A;
      case 'B': case 'b': return MapId::B;
      case 'C': case 'c': return MapId::C;
      case 'D': case 'd': return MapId::D;
      default: break;
    }
  }
  throw UsageError("unknown map '" + s + "' (expected A, B, C, D)");
}

inline OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  throw UsageError("unknown format '" + s + "' (expected csv, json)");
}

struct TestStatsArgs {
  std::filesystem::path csv_a;
  std::filesystem::path csv_b;
  std::string column = "best_energy";
  std::string column_b;  // empty = same as column
};

struct CliInvocation {
  std::optional<ExperimentPlan> run_plan;
  std::optional<TestStatsArgs> test_stats;
  bool done = false;  // help or CLI error already reported
  int exit_code = 0;
};

inline const char* kDefaultConfigFile = "miniworld.cfg";

namespace detail {

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t comma = s.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

inline std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

// Flat key=value lines; '#' starts a comment, blank lines are ignored.
inline std::vector<std::pair<std::string, std::string>> read_config_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw UsageError("cannot read config file '" + path.string() + "'");
  }
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config file '" + path.string() + "' line " +
                       std::to_string(line_number) + ": expected key=value");
    }
    entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return entries;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T v{};
  const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
  if (res.ec != std::errc{} || res.ptr != value.data() + value.size()) {
    throw UsageError("bad value '" + value + "' for " + key);
  }
  return v;
}

inline bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw UsageError("bad value '" + value + "' for " + key + " (expected true/false)");
}

}  // namespace detail

inline void validate_plan(const ExperimentPlan& plan) {
  if (plan.modes.empty()) throw UsageError("no modes selected");
  if (plan.maps.empty()) throw UsageError("no maps selected");
  if (plan.runs < 1) throw UsageError("runs must be at least 1");
  if (plan.generations < 1) throw UsageError("generations must be at least 1");
  if (plan.steps < 1) throw UsageError("steps must be at least 1");
  if (plan.population < 1) throw UsageError("population must be at least 1");
  if (plan.learning_rate <= 0.0) throw UsageError("learning-rate must be positive");
  if (plan.mutation_rate < 0.0 || plan.mutation_rate > 1.0) {
    throw UsageError("mutation-rate must be in [0,1]");
  }
  if (plan.jobs < 0) throw UsageError("jobs must be at least 1");
}

// Parses argv (program name excluded). Throws UsageError for invalid values;
// CLI11-level errors (unknown flags, missing arguments, --help) are reported
// through `done` and `exit_code`.
inline CliInvocation parse_cli(std::vector<std::string> args) {
  CliInvocation invocation;
  ExperimentPlan plan;

  CLI::App app{"Multi-agent foraging experiments with evolved and self-teaching"
               " neural controllers"};
  app.name("miniworld");
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run an experiment sweep");
  std::vector<std::string> mode_names;
  std::vector<std::string> map_names;
  std::string out_dir;
  std::string format_name;
  std::string config_file;
  double learning_rate = plan.learning_rate;
  double mutation_rate = plan.mutation_rate;
  bool no_bias = false;

  auto* mode_opt = run->add_option("--mode", mode_names,
                                   "Regimes to run: evo, evo-ss, ss (default all)")
                       ->delimiter(',');
  auto* map_opt =
      run->add_option("--map", map_names, "Maps to run: A, B, C, D (default all)")
          ->delimiter(',');
  auto* runs_opt = run->add_option("--runs", plan.runs, "Independent runs per cell");
  auto* gens_opt = run->add_option("--generations", plan.generations,
                                   "Generations per run");
  auto* steps_opt = run->add_option("--steps", plan.steps, "Timesteps per generation");
  auto* seed_opt = run->add_option("--seed", plan.base_seed, "Base seed for the sweep");
  auto* lr_opt = run->add_option("--learning-rate", learning_rate,
                                 "Self-teaching learning rate");
  auto* mut_opt = run->add_option("--mutation-rate", mutation_rate,
                                  "Per-weight mutation probability");
  auto* bias_opt = run->add_flag("--no-bias", no_bias,
                                 "Run the zero-bias network variant");
  auto* jobs_opt = run->add_option("--jobs", plan.jobs,
                                   "Concurrent runs (default: available processors)");
  auto* out_opt = run->add_option("--out", out_dir, "Output directory");
  auto* format_opt = run->add_option("--format", format_name,
                                     "Per-generation output format: csv or json");
  run->add_option("--config", config_file,
                  "Config file (default: miniworld.cfg if present)");

  auto* stats = app.add_subcommand("test-stats",
                                   "Rank-sum test between two CSV columns");
  TestStatsArgs stats_args;
  stats->add_option("csv_a", stats_args.csv_a, "First CSV file")->required();
  stats->add_option("csv_b", stats_args.csv_b, "Second CSV file")->required();
  stats->add_option("--column", stats_args.column,
                    "Column name (default: best_energy)");
  stats->add_option("--column-b", stats_args.column_b,
                    "Column name in the second file (default: --column)");

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    invocation.done = true;
    invocation.exit_code = app.exit(e);
    return invocation;
  }

  if (stats->parsed()) {
    if (stats_args.column_b.empty()) stats_args.column_b = stats_args.column;
    invocation.test_stats = std::move(stats_args);
    return invocation;
  }

  // Fill unset options from the config file, if there is one.
  std::filesystem::path config_path;
  if (!config_file.empty()) {
    config_path = config_file;
  } else if (std::filesystem::exists(kDefaultConfigFile)) {
    config_path = kDefaultConfigFile;
  }
  if (!config_path.empty()) {
    for (const auto& [key, value] : detail::read_config_file(config_path)) {
      if (key == "mode") {
        if (mode_opt->count() == 0) mode_names = detail::split_list(value);
      } else if (key == "map") {
        if (map_opt->count() == 0) map_names = detail::split_list(value);
      } else if (key == "runs") {
        if (runs_opt->count() == 0) plan.runs = detail::parse_number<int>(key, value);
      } else if (key == "generations") {
        if (gens_opt->count() == 0) {
          plan.generations = detail::parse_number<int>(key, value);
        }
      } else if (key == "steps") {
        if (steps_opt->count() == 0) plan.steps = detail::parse_number<int>(key, value);
      } else if (key == "seed") {
        if (seed_opt->count() == 0) {
          plan.base_seed = detail::parse_number<std::uint64_t>(key, value);
        }
      } else if (key == "learning-rate") {
        if (lr_opt->count() == 0) {
          learning_rate = detail::parse_number<double>(key, value);
        }
      } else if (key == "mutation-rate") {
        if (mut_opt->count() == 0) {
          mutation_rate = detail::parse_number<double>(key, value);
        }
      } else if (key == "no-bias") {
        if (bias_opt->count() == 0) no_bias = detail::parse_bool(key, value);
      } else if (key == "jobs") {
        if (jobs_opt->count() == 0) plan.jobs = detail::parse_number<int>(key, value);
      } else if (key == "out") {
        if (out_opt->count() == 0) out_dir = value;
      } else if (key == "format") {
        if (format_opt->count() == 0) format_name = value;
      } else {
        throw UsageError("unknown key '" + key + "' in config file '" +
                         config_path.string() + "'");
      }
    }
  }

  plan.learning_rate = learning_rate;
  plan.mutation_rate = mutation_rate;
  plan.no_bias = no_bias;
  if (!out_dir.empty()) plan.output_dir = out_dir;
  if (!format_name.empty()) plan.format = parse_format(format_name);

  if (!mode_names.empty()) {
    plan.modes.clear();
    for (const std::string& name : mode_names) plan.modes.push_back(parse_mode(name));
  }
  if (!map_names.empty()) {
    plan.maps.clear();
    for (const std::string& name : map_names) plan.maps.push_back(parse_map(name));
  }
  // Canonical cell order: deduped, enum order. Output files do not depend on
  // how the selection was spelled.
  std::sort(plan.modes.begin(), plan.modes.end());
  plan.modes.erase(std::unique(plan.modes.begin(), plan.modes.end()), plan.modes.end());
  std::sort(plan.maps.begin(), plan.maps.end());
  plan.maps.erase(std::unique(plan.maps.begin(), plan.maps.end()), plan.maps.end());

  validate_plan(plan);
  invocation.run_plan = std::move(plan);
  return invocation;
}

inline int run_test_stats(const TestStatsArgs& args) {
  try {
    const std::vector<double> a = read_csv_column(args.csv_a, args.column);
    const std::vector<double> b = read_csv_column(args.csv_b, args.column_b);
    const RankSumResult result = rank_sum_test(a, b);
    std::printf("n_a = %zu\nn_b = %zu\nU = %s\np = %s\n", a.size(), b.size(),
                detail::format_double(result.u).c_str(),
                detail::format_double(result.p).c_str());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

inline int cli_main(int argc, const char* const* argv) {
  std::vector<std::string> args;
  args.reserve(static_cast<std::size_t>(argc > 0 ? argc - 1 : 0));
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  try {
    const CliInvocation invocation = parse_cli(std::move(args));
    if (invocation.done) return invocation.exit_code;
    if (invocation.test_stats) return run_test_stats(*invocation.test_stats);
    if (invocation.run_plan) return execute_plan(*invocation.run_plan);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}

}  // namespace miniworld
