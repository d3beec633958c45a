// Per-generation statistics, cross-run aggregation, and the Mann-Whitney
// rank-sum test used to compare regimes.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace miniworld {

struct GenerationRecord {
  int run_id = 0;
  int generation = 0;
  double best_energy = 0.0;
  double mean_energy = 0.0;
  double best_fitness = 0.0;
  double mean_fitness = 0.0;
  long total_food = 0;
  long total_poison = 0;
};

inline GenerationRecord summarize_generation(const std::vector<int>& energies,
                                             const std::vector<int>& fitnesses) {
  if (energies.empty() || energies.size() != fitnesses.size()) {
    throw std::invalid_argument("summarize_generation: length mismatch");
  }
  GenerationRecord r;
  long energy_sum = 0;
  long fitness_sum = 0;
  r.best_energy = energies[0];
  r.best_fitness = fitnesses[0];
  for (std::size_t i = 0; i < energies.size(); ++i) {
    r.best_energy = std::max(r.best_energy, static_cast<double>(energies[i]));
    r.best_fitness = std::max(r.best_fitness, static_cast<double>(fitnesses[i]));
    energy_sum += energies[i];
    fitness_sum += fitnesses[i];
  }
  const double n = static_cast<double>(energies.size());
  r.mean_energy = static_cast<double>(energy_sum) / n;
  r.mean_fitness = static_cast<double>(fitness_sum) / n;
  r.total_food = fitness_sum;                 // fitness counts food
  r.total_poison = fitness_sum - energy_sum;  // energy = food - poison
  return r;
}

struct RankSumResult {
  double u = 0.0;  // U statistic of the first sample
  double p = 1.0;  // two-sided
};

namespace detail {

// Midranks of the pooled samples, first sample's values first.
inline std::vector<double> pooled_midranks(const std::vector<double>& a,
                                           const std::vector<double>& b) {
  const std::size_t n = a.size() + b.size();
  std::vector<double> values;
  values.reserve(n);
  values.insert(values.end(), a.begin(), a.end());
  values.insert(values.end(), b.begin(), b.end());

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });

  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = midrank;
    i = j + 1;
  }
  return ranks;
}

inline double u_statistic(const std::vector<double>& ranks, std::size_t n_a) {
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < n_a; ++i) rank_sum += ranks[i];
  return rank_sum - static_cast<double>(n_a) * (static_cast<double>(n_a) + 1.0) / 2.0;
}

}  // namespace detail

// Exact permutation distribution of U over all C(n_a+n_b, n_a) group
// assignments; handles ties through midranks. Cost grows combinatorially,
// intended for small samples.
inline RankSumResult rank_sum_exact(const std::vector<double>& a,
                                    const std::vector<double>& b) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("rank_sum_exact: empty sample");
  }
  const std::size_t n_a = a.size();
  const std::size_t n = n_a + b.size();
  const std::vector<double> ranks = detail::pooled_midranks(a, b);
  const double u_obs = detail::u_statistic(ranks, n_a);

  // Mask starts at the lexicographically largest arrangement so
  // prev_permutation walks every distinct subset exactly once.
  std::vector<char> mask(n, 0);
  std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(n_a), 1);
  const double offset = static_cast<double>(n_a) * (static_cast<double>(n_a) + 1.0) / 2.0;

  std::uint64_t total = 0, count_le = 0, count_ge = 0;
  do {
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask[i]) rank_sum += ranks[i];
    }
    const double u = rank_sum - offset;
    ++total;
    if (u <= u_obs + 1e-9) ++count_le;
    if (u >= u_obs - 1e-9) ++count_ge;
  } while (std::prev_permutation(mask.begin(), mask.end()));

  const double tail = static_cast<double>(std::min(count_le, count_ge)) /
                      static_cast<double>(total);
  return {u_obs, std::min(1.0, 2.0 * tail)};
}

// Normal approximation with tie correction and continuity correction.
// Degenerate pools (every value identical) get p = 1.
inline RankSumResult rank_sum_normal(const std::vector<double>& a,
                                     const std::vector<double>& b) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("rank_sum_normal: empty sample");
  }
  const double n_a = static_cast<double>(a.size());
  const double n_b = static_cast<double>(b.size());
  const double n = n_a + n_b;
  const std::vector<double> ranks = detail::pooled_midranks(a, b);
  const double u = detail::u_statistic(ranks, a.size());

  // Tie term sum(t^3 - t) over groups of equal pooled values.
  std::vector<double> sorted_ranks = ranks;
  std::sort(sorted_ranks.begin(), sorted_ranks.end());
  double tie_term = 0.0;
  std::size_t i = 0;
  while (i < sorted_ranks.size()) {
    std::size_t j = i;
    while (j + 1 < sorted_ranks.size() && sorted_ranks[j + 1] == sorted_ranks[i]) ++j;
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }

  const double mean = n_a * n_b / 2.0;
  const double variance =
      n_a * n_b / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  if (variance <= 0.0) return {u, 1.0};

  double z = (std::abs(u - mean) - 0.5) / std::sqrt(variance);
  if (z < 0.0) z = 0.0;
  const double p = std::erfc(z / std::numbers::sqrt2);
  return {u, std::min(1.0, p)};
}

// Exact enumeration when both samples are small (below 8), otherwise the
// tie-corrected normal approximation.
inline RankSumResult rank_sum_test(const std::vector<double>& a,
                                   const std::vector<double>& b) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("rank_sum_test: empty sample");
  }
  if (a.size() < 8 && b.size() < 8) return rank_sum_exact(a, b);
  return rank_sum_normal(a, b);
}

// Cross-run view of one experiment cell: per-generation mean and standard
// deviation plus the final-generation sample vectors used for testing.
struct RunAggregate {
  std::vector<int> run_ids;      // ascending
  std::vector<int> generations;  // common grid, ascending
  std::vector<double> best_energy_mean, best_energy_sd;
  std::vector<double> mean_energy_mean, mean_energy_sd;
  std::vector<double> final_best_energy;  // one entry per run, run_ids order
  std::vector<double> final_mean_energy;
};

namespace detail {

inline std::pair<double, double> mean_sd(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0))};
}

}  // namespace detail

inline RunAggregate aggregate_runs(const std::vector<GenerationRecord>& records) {
  if (records.empty()) {
    throw std::invalid_argument("aggregate_runs: no records");
  }
  std::map<int, std::vector<GenerationRecord>> by_run;
  for (const GenerationRecord& r : records) by_run[r.run_id].push_back(r);

  RunAggregate agg;
  for (auto& [run_id, rs] : by_run) {
    std::sort(rs.begin(), rs.end(),
              [](const GenerationRecord& x, const GenerationRecord& y) {
                return x.generation < y.generation;
              });
    std::vector<int> grid;
    grid.reserve(rs.size());
    for (const GenerationRecord& r : rs) grid.push_back(r.generation);
    if (agg.run_ids.empty()) {
      agg.generations = grid;
    } else if (grid != agg.generations) {
      throw std::invalid_argument("aggregate_runs: ragged generation grid");
    }
    agg.run_ids.push_back(run_id);
  }

  const std::size_t gens = agg.generations.size();
  for (std::size_t g = 0; g < gens; ++g) {
    std::vector<double> best, mean;
    best.reserve(agg.run_ids.size());
    mean.reserve(agg.run_ids.size());
    for (int run_id : agg.run_ids) {
      const GenerationRecord& r = by_run[run_id][g];
      best.push_back(r.best_energy);
      mean.push_back(r.mean_energy);
    }
    const auto [bm, bs] = detail::mean_sd(best);
    const auto [mm, ms] = detail::mean_sd(mean);
    agg.best_energy_mean.push_back(bm);
    agg.best_energy_sd.push_back(bs);
    agg.mean_energy_mean.push_back(mm);
    agg.mean_energy_sd.push_back(ms);
    if (g + 1 == gens) {
      agg.final_best_energy = best;
      agg.final_mean_energy = mean;
    }
  }
  return agg;
}

}  // namespace miniworld
