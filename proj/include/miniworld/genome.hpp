// Genetic representation of controllers and the evolutionary operators.
#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "miniworld/net.hpp"
#include "miniworld/rng.hpp"

namespace miniworld {

// Flattened net layout: w1 row-major, then b1, then w2 row-major, then b2.
inline constexpr int kGenomeLength =
    kNumHidden * kNumInputs + kNumHidden + kNumActions * kNumHidden + kNumActions;

using WeightVector = std::array<double, kGenomeLength>;

// Innate weights for both network modules; immutable during a lifetime.
struct Genome {
  WeightVector action{};
  WeightVector reinforcement{};

  friend bool operator==(const Genome&, const Genome&) = default;
};

inline LayerNet unpack_net(const WeightVector& w) {
  LayerNet net;
  std::size_t pos = 0;
  std::copy_n(w.begin() + pos, net.w1.size(), net.w1.begin());
  pos += net.w1.size();
  std::copy_n(w.begin() + pos, net.b1.size(), net.b1.begin());
  pos += net.b1.size();
  std::copy_n(w.begin() + pos, net.w2.size(), net.w2.begin());
  pos += net.w2.size();
  std::copy_n(w.begin() + pos, net.b2.size(), net.b2.begin());
  return net;
}

inline WeightVector pack_net(const LayerNet& net) {
  WeightVector w;
  std::size_t pos = 0;
  std::copy(net.w1.begin(), net.w1.end(), w.begin() + pos);
  pos += net.w1.size();
  std::copy(net.b1.begin(), net.b1.end(), w.begin() + pos);
  pos += net.b1.size();
  std::copy(net.w2.begin(), net.w2.end(), w.begin() + pos);
  pos += net.w2.size();
  std::copy(net.b2.begin(), net.b2.end(), w.begin() + pos);
  return w;
}

// All entries drawn from N(0,1): action weights first, then reinforcement.
inline Genome random_genome(RngStream& rng) {
  Genome g;
  for (double& x : g.action) x = rng.gaussian();
  for (double& x : g.reinforcement) x = rng.gaussian();
  return g;
}

struct ScoredGenome {
  Genome genome;
  int fitness = 0;  // food eaten; the selection signal
  int energy = 0;   // food - poison; the reported metric
};

// Fitness-proportionate roulette; uniform fallback when all fitness is zero.
// The two draws are independent, so a genome may pair with itself.
inline std::pair<int, int> select_parents(const std::vector<ScoredGenome>& population,
                                          RngStream& rng) {
  if (population.empty()) {
    throw std::invalid_argument("select_parents: empty population");
  }
  long total = 0;
  for (const ScoredGenome& s : population) total += s.fitness;

  auto draw = [&]() -> int {
    const int n = static_cast<int>(population.size());
    if (total == 0) return static_cast<int>(rng.uniform_int(n));
    const double r = rng.uniform(0.0, static_cast<double>(total));
    double cum = 0.0;
    for (int i = 0; i < n; ++i) {
      cum += population[i].fitness;
      if (r < cum) return i;
    }
    return n - 1;
  };

  const int first = draw();
  const int second = draw();
  return {first, second};
}

inline double crossover_ratio(int f1, int f2) {
  const int total = f1 + f2;
  return total == 0 ? 0.5 : static_cast<double>(f1) / total;
}

// Per weight position an independent uniform draw r: copy from p1 if
// r < f1/(f1+f2), otherwise from p2. Action positions are drawn first.
inline Genome crossover(const ScoredGenome& p1, const ScoredGenome& p2,
                        RngStream& rng) {
  const double ratio = crossover_ratio(p1.fitness, p2.fitness);
  Genome child;
  for (int i = 0; i < kGenomeLength; ++i) {
    child.action[i] =
        rng.uniform01() < ratio ? p1.genome.action[i] : p2.genome.action[i];
  }
  for (int i = 0; i < kGenomeLength; ++i) {
    child.reinforcement[i] = rng.uniform01() < ratio ? p1.genome.reinforcement[i]
                                                     : p2.genome.reinforcement[i];
  }
  return child;
}

inline constexpr double kMutationDelta = 0.05;

// Each weight independently mutates with probability `rate` by adding a
// uniform draw from [-kMutationDelta, kMutationDelta].
inline Genome mutate(Genome g, double rate, RngStream& rng) {
  auto mutate_vector = [&](WeightVector& w) {
    for (double& x : w) {
      if (rng.bernoulli(rate)) x += rng.uniform(-kMutationDelta, kMutationDelta);
    }
  };
  mutate_vector(g.action);
  mutate_vector(g.reinforcement);
  return g;
}

// Full generational replacement, no elitism: every child is
// select -> crossover -> mutate.
inline std::vector<Genome> next_generation(const std::vector<ScoredGenome>& population,
                                           RngStream& rng,
                                           double mutation_rate = 0.05) {
  std::vector<Genome> children;
  children.reserve(population.size());
  for (std::size_t c = 0; c < population.size(); ++c) {
    const auto [i, j] = select_parents(population, rng);
    children.push_back(mutate(crossover(population[i], population[j], rng),
                              mutation_rate, rng));
  }
  return children;
}

namespace detail {

inline void append_double(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

}  // namespace detail

// Snapshot format: one genome per line, 2 * kGenomeLength numbers in the
// flattened layout (action vector first), space separated, round-trip
// precision.
inline void save_genomes(const std::filesystem::path& path,
                         std::span<const Genome> genomes) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write genome file: " + path.string());
  }
  std::string line;
  for (const Genome& g : genomes) {
    line.clear();
    for (int i = 0; i < kGenomeLength; ++i) {
      if (i > 0) line.push_back(' ');
      detail::append_double(line, g.action[i]);
    }
    for (int i = 0; i < kGenomeLength; ++i) {
      line.push_back(' ');
      detail::append_double(line, g.reinforcement[i]);
    }
    line.push_back('\n');
    out << line;
  }
  if (!out.flush()) {
    throw std::runtime_error("cannot write genome file: " + path.string());
  }
}

inline std::vector<Genome> load_genomes(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot read genome file: " + path.string());
  }
  std::vector<Genome> genomes;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Genome g;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    auto next_value = [&](double& out_value) {
      while (p < end && *p == ' ') ++p;
      const auto res = std::from_chars(p, end, out_value);
      if (res.ec != std::errc{}) {
        throw std::runtime_error("malformed genome file: " + path.string());
      }
      p = res.ptr;
    };
    for (double& x : g.action) next_value(x);
    for (double& x : g.reinforcement) next_value(x);
    genomes.push_back(g);
  }
  return genomes;
}

}  // namespace miniworld
