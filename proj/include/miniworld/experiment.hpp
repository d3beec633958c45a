// Experiment sweep: a plan covers (mode, map, run) cells, each run is an
// independent seeded experiment. Results land in a per-generation table, a
// summary with rank-sum tests, and a plot-data file of mean +/- sd curves.
// Outputs are byte-identical for identical plans regardless of job count.
#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "miniworld/metrics.hpp"
#include "miniworld/sim.hpp"

namespace miniworld {

enum class OutputFormat { Csv, Json };

inline const char* to_string(OutputFormat f) {
  return f == OutputFormat::Csv ? "csv" : "json";
}

struct ExperimentPlan {
  std::vector<Mode> modes = {Mode::Evo, Mode::EvoSS, Mode::SS};
  std::vector<MapId> maps = {MapId::A, MapId::B, MapId::C, MapId::D};
  int runs = 30;
  std::uint64_t base_seed = 0;
  int generations = 100;
  int steps = 5000;
  int population = 20;
  double learning_rate = 0.01;
  double mutation_rate = 0.05;
  bool no_bias = false;
  int jobs = 0;  // 0 = number of available processors
  std::filesystem::path output_dir = "results";
  OutputFormat format = OutputFormat::Csv;
};

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Per-run seed: base_seed XOR hash("mode/map/run"). Cells are independent
// of each other and of the plan's cell ordering.
inline std::uint64_t cell_seed(std::uint64_t base_seed, Mode mode, MapId map,
                               int run_index) {
  std::string key = std::string(to_string(mode)) + "/" + to_string(map) + "/" +
                    std::to_string(run_index);
  return base_seed ^ fnv1a64(key);
}

struct CellResult {
  Mode mode = Mode::Evo;
  MapId map = MapId::A;
  std::vector<std::uint64_t> seeds;                      // per run
  std::vector<std::vector<GenerationRecord>> run_records;  // per run
  RunAggregate aggregate;
};

inline RegimeConfig cell_config(const ExperimentPlan& plan, Mode mode, MapId map,
                                int run_index) {
  RegimeConfig config;
  config.mode = mode;
  config.map = map;
  config.generations = plan.generations;
  config.steps_per_generation = plan.steps;
  config.population = plan.population;
  config.learning_rate = plan.learning_rate;
  config.mutation_rate = plan.mutation_rate;
  config.no_bias = plan.no_bias;
  config.seed = cell_seed(plan.base_seed, mode, map, run_index);
  return config;
}

// Runs every (mode, map, run) cell of the plan, `jobs` runs at a time.
// Results are stored by task index, so the outcome does not depend on
// scheduling.
inline std::vector<CellResult> run_plan_cells(const ExperimentPlan& plan) {
  struct Task {
    std::size_t cell;
    int run;
  };
  std::vector<CellResult> cells;
  std::vector<Task> tasks;
  for (Mode mode : plan.modes) {
    for (MapId map : plan.maps) {
      CellResult cell;
      cell.mode = mode;
      cell.map = map;
      cell.seeds.resize(static_cast<std::size_t>(plan.runs));
      cell.run_records.resize(static_cast<std::size_t>(plan.runs));
      for (int run = 0; run < plan.runs; ++run) {
        tasks.push_back({cells.size(), run});
      }
      cells.push_back(std::move(cell));
    }
  }

  unsigned jobs = plan.jobs > 0 ? static_cast<unsigned>(plan.jobs)
                                : std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(tasks.size()));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= tasks.size()) return;
      const Task task = tasks[t];
      CellResult& cell = cells[task.cell];
      try {
        const RegimeConfig config = cell_config(plan, cell.mode, cell.map, task.run);
        cell.seeds[static_cast<std::size_t>(task.run)] = config.seed;
        cell.run_records[static_cast<std::size_t>(task.run)] =
            run_experiment(config, task.run);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(tasks.size());
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  for (unsigned i = 0; i < jobs; ++i) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  for (CellResult& cell : cells) {
    std::vector<GenerationRecord> all;
    for (const auto& records : cell.run_records) {
      all.insert(all.end(), records.begin(), records.end());
    }
    cell.aggregate = aggregate_runs(all);
  }
  return cells;
}

namespace detail {

// Shortest round-trip decimal form; keeps output files byte-stable.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace detail

inline constexpr const char* kResultsCsvHeader =
    "mode,map,run,generation,best_energy,mean_energy,best_fitness,mean_fitness,"
    "total_food,total_poison";

inline std::string results_csv(const std::vector<CellResult>& cells) {
  std::string out = kResultsCsvHeader;
  out.push_back('\n');
  for (const CellResult& cell : cells) {
    for (std::size_t run = 0; run < cell.run_records.size(); ++run) {
      for (const GenerationRecord& r : cell.run_records[run]) {
        out += to_string(cell.mode);
        out.push_back(',');
        out += to_string(cell.map);
        out.push_back(',');
        out += std::to_string(run);
        out.push_back(',');
        out += std::to_string(r.generation);
        out.push_back(',');
        out += detail::format_double(r.best_energy);
        out.push_back(',');
        out += detail::format_double(r.mean_energy);
        out.push_back(',');
        out += detail::format_double(r.best_fitness);
        out.push_back(',');
        out += detail::format_double(r.mean_fitness);
        out.push_back(',');
        out += std::to_string(r.total_food);
        out.push_back(',');
        out += std::to_string(r.total_poison);
        out.push_back('\n');
      }
    }
  }
  return out;
}

inline nlohmann::json results_json(const std::vector<CellResult>& cells) {
  nlohmann::json rows = nlohmann::json::array();
  for (const CellResult& cell : cells) {
    for (std::size_t run = 0; run < cell.run_records.size(); ++run) {
      for (const GenerationRecord& r : cell.run_records[run]) {
        rows.push_back({{"mode", to_string(cell.mode)},
                        {"map", to_string(cell.map)},
                        {"run", run},
                        {"generation", r.generation},
                        {"best_energy", r.best_energy},
                        {"mean_energy", r.mean_energy},
                        {"best_fitness", r.best_fitness},
                        {"mean_fitness", r.mean_fitness},
                        {"total_food", r.total_food},
                        {"total_poison", r.total_poison}});
      }
    }
  }
  return rows;
}

inline std::string plot_data_csv(const std::vector<CellResult>& cells) {
  std::string out =
      "mode,map,generation,best_energy_mean,best_energy_sd,mean_energy_mean,"
      "mean_energy_sd\n";
  for (const CellResult& cell : cells) {
    const RunAggregate& agg = cell.aggregate;
    for (std::size_t g = 0; g < agg.generations.size(); ++g) {
      out += to_string(cell.mode);
      out.push_back(',');
      out += to_string(cell.map);
      out.push_back(',');
      out += std::to_string(agg.generations[g]);
      out.push_back(',');
      out += detail::format_double(agg.best_energy_mean[g]);
      out.push_back(',');
      out += detail::format_double(agg.best_energy_sd[g]);
      out.push_back(',');
      out += detail::format_double(agg.mean_energy_mean[g]);
      out.push_back(',');
      out += detail::format_double(agg.mean_energy_sd[g]);
      out.push_back('\n');
    }
  }
  return out;
}

// Summary: the full plan (with per-run seeds, enough to replay any run),
// final-generation statistics per cell, and rank-sum tests between every
// mode pair sharing a map, on both best and mean energy.
inline nlohmann::json summary_json(const ExperimentPlan& plan,
                                   const std::vector<CellResult>& cells) {
  nlohmann::json summary;
  nlohmann::json plan_json;
  plan_json["modes"] = nlohmann::json::array();
  for (Mode m : plan.modes) plan_json["modes"].push_back(to_string(m));
  plan_json["maps"] = nlohmann::json::array();
  for (MapId m : plan.maps) plan_json["maps"].push_back(to_string(m));
  plan_json["runs"] = plan.runs;
  plan_json["base_seed"] = plan.base_seed;
  plan_json["generations"] = plan.generations;
  plan_json["steps"] = plan.steps;
  plan_json["population"] = plan.population;
  plan_json["learning_rate"] = plan.learning_rate;
  plan_json["mutation_rate"] = plan.mutation_rate;
  plan_json["no_bias"] = plan.no_bias;
  plan_json["format"] = to_string(plan.format);
  summary["plan"] = plan_json;

  nlohmann::json cell_list = nlohmann::json::array();
  for (const CellResult& cell : cells) {
    nlohmann::json c;
    c["mode"] = to_string(cell.mode);
    c["map"] = to_string(cell.map);
    nlohmann::json runs = nlohmann::json::array();
    const RunAggregate& agg = cell.aggregate;
    for (std::size_t run = 0; run < cell.seeds.size(); ++run) {
      runs.push_back({{"run", run},
                      {"seed", cell.seeds[run]},
                      {"final_best_energy", agg.final_best_energy[run]},
                      {"final_mean_energy", agg.final_mean_energy[run]}});
    }
    c["runs"] = runs;
    const auto [fb_mean, fb_sd] = detail::mean_sd(agg.final_best_energy);
    const auto [fm_mean, fm_sd] = detail::mean_sd(agg.final_mean_energy);
    c["final_best_energy"] = {{"mean", fb_mean}, {"sd", fb_sd}};
    c["final_mean_energy"] = {{"mean", fm_mean}, {"sd", fm_sd}};
    cell_list.push_back(c);
  }
  summary["cells"] = cell_list;

  nlohmann::json tests = nlohmann::json::array();
  for (MapId map : plan.maps) {
    std::vector<const CellResult*> in_map;
    for (const CellResult& cell : cells) {
      if (cell.map == map) in_map.push_back(&cell);
    }
    for (std::size_t i = 0; i < in_map.size(); ++i) {
      for (std::size_t j = i + 1; j < in_map.size(); ++j) {
        const RankSumResult best = rank_sum_test(in_map[i]->aggregate.final_best_energy,
                                                 in_map[j]->aggregate.final_best_energy);
        const RankSumResult mean = rank_sum_test(in_map[i]->aggregate.final_mean_energy,
                                                 in_map[j]->aggregate.final_mean_energy);
        tests.push_back({{"map", to_string(map)},
                         {"mode_a", to_string(in_map[i]->mode)},
                         {"mode_b", to_string(in_map[j]->mode)},
                         {"best_energy", {{"u", best.u}, {"p", best.p}}},
                         {"mean_energy", {{"u", mean.u}, {"p", mean.p}}}});
      }
    }
  }
  summary["tests"] = tests;
  return summary;
}

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& body,
                       std::vector<std::filesystem::path>& written) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  }
  written.push_back(path);
  out << body;
  if (!out.flush()) {
    throw std::runtime_error("write failed for '" + path.string() + "'");
  }
}

}  // namespace detail

// Computes all cells and writes the output files. On failure the files
// created by this invocation are removed again.
inline void write_plan_outputs(const ExperimentPlan& plan,
                               const std::vector<CellResult>& cells) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(plan.output_dir, ec);
  if (ec) {
    throw std::runtime_error("cannot create output directory '" +
                             plan.output_dir.string() + "': " + ec.message());
  }
  std::vector<fs::path> written;
  try {
    if (plan.format == OutputFormat::Csv) {
      detail::write_file(plan.output_dir / "results.csv", results_csv(cells), written);
    } else {
      detail::write_file(plan.output_dir / "results.json",
                         results_json(cells).dump(2) + "\n", written);
    }
    detail::write_file(plan.output_dir / "plot_data.csv", plot_data_csv(cells), written);
    detail::write_file(plan.output_dir / "summary.json",
                       summary_json(plan, cells).dump(2) + "\n", written);
  } catch (...) {
    for (const fs::path& p : written) fs::remove(p, ec);
    throw;
  }
}

inline int execute_plan(const ExperimentPlan& plan) {
  try {
    const std::vector<CellResult> cells = run_plan_cells(plan);
    write_plan_outputs(plan, cells);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

// Reads one named column from a CSV file with a header row.
inline std::vector<double> read_csv_column(const std::filesystem::path& path,
                                           const std::string& column) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot read '" + path.string() + "'");
  }
  auto split = [](const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = line.find(',', start);
      if (comma == std::string::npos) {
        fields.push_back(line.substr(start));
        return fields;
      }
      fields.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
  };

  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("empty CSV file '" + path.string() + "'");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split(line);
  std::size_t index = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == column) {
      index = i;
      break;
    }
  }
  if (index == header.size()) {
    throw std::runtime_error("no column '" + column + "' in '" + path.string() + "'");
  }

  std::vector<double> values;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split(line);
    if (index >= fields.size()) {
      throw std::runtime_error("short row at line " + std::to_string(line_number) +
                               " in '" + path.string() + "'");
    }
    double v = 0.0;
    const std::string& f = fields[index];
    const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
    if (res.ec != std::errc{} || res.ptr != f.data() + f.size()) {
      throw std::runtime_error("bad number '" + f + "' at line " +
                               std::to_string(line_number) + " in '" +
                               path.string() + "'");
    }
    values.push_back(v);
  }
  return values;
}

}  // namespace miniworld
