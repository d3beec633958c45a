// Timestep, lifetime, and generation orchestration for the three regimes:
// evolution alone, evolution plus self-supervised learning, and
// self-supervised learning alone.
#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "miniworld/genome.hpp"
#include "miniworld/metrics.hpp"
#include "miniworld/net.hpp"
#include "miniworld/rng.hpp"
#include "miniworld/world.hpp"

namespace miniworld {

enum class Mode { Evo, EvoSS, SS };

inline const char* to_string(Mode mode) {
  switch (mode) {
    case Mode::Evo: return "evo";
    case Mode::EvoSS: return "evo-ss";
    case Mode::SS: return "ss";
  }
  return "?";
}

inline const char* to_string(MapId map) {
  switch (map) {
    case MapId::A: return "A";
    case MapId::B: return "B";
    case MapId::C: return "C";
    case MapId::D: return "D";
  }
  return "?";
}

struct RegimeConfig {
  Mode mode = Mode::EvoSS;
  MapId map = MapId::A;
  int generations = 100;
  int steps_per_generation = 5000;
  int population = 20;
  double learning_rate = 0.01;
  double mutation_rate = 0.05;
  bool no_bias = false;  // zero both bias vectors and exclude them from learning
  std::uint64_t seed = 0;
};

// Working copies of the two network modules. The reinforcement net never
// changes during a lifetime; the action net changes only when learning is on.
struct ControllerPhenotype {
  LayerNet action_net;
  LayerNet reinforcement_net;
};

inline ControllerPhenotype make_phenotype(const Genome& genome, bool no_bias) {
  ControllerPhenotype p{unpack_net(genome.action), unpack_net(genome.reinforcement)};
  if (no_bias) {
    p.action_net.b1.fill(0.0);
    p.action_net.b2.fill(0.0);
    p.reinforcement_net.b1.fill(0.0);
    p.reinforcement_net.b2.fill(0.0);
  }
  return p;
}

// One timestep. Agents act sequentially in index order with immediate
// eating and respawn, so two agents cannot consume the same substance.
// Learning runs after movement and eating, on the same input that produced
// the action.
inline void step(WorldState& world, std::vector<ControllerPhenotype>& phenotypes,
                 const RegimeConfig& config, RngStream& respawn_rng) {
  const bool learning = config.mode != Mode::Evo;
  const std::size_t count = world.agents.size();
  for (std::size_t i = 0; i < count; ++i) {
    AgentState& agent = world.agents[i];
    ControllerPhenotype& controller = phenotypes[i];

    const InputVector input = sense(world, agent);
    const Activations acts = forward(controller.action_net, input);
    const int action = select_action(acts.output);
    agent = apply_action(agent, action, world.map);
    check_eat(world, static_cast<int>(i), respawn_rng);

    if (learning) {
      const OutputVector target = forward(controller.reinforcement_net, input).output;
      self_teach_step(controller.action_net, input, acts, target,
                      config.learning_rate, !config.no_bias);
    }
  }
  ++world.timestep;
}

struct GenerationResult {
  std::vector<ScoredGenome> scored;
  GenerationRecord record;
  std::vector<ControllerPhenotype> final_phenotypes;
};

// One lifetime: fresh world, fresh phenotypes, a fixed number of steps,
// then scoring. The genomes themselves are never written to.
inline GenerationResult run_generation(const std::vector<Genome>& genomes,
                                       const RegimeConfig& config, RunRngs& rngs,
                                       int run_id = 0, int generation = 0) {
  const MapSpec map = MapSpec::standard(config.map);
  WorldState world =
      init_world(map, rngs.world_init, static_cast<int>(genomes.size()));

  std::vector<ControllerPhenotype> phenotypes;
  phenotypes.reserve(genomes.size());
  for (const Genome& g : genomes) phenotypes.push_back(make_phenotype(g, config.no_bias));

  for (int t = 0; t < config.steps_per_generation; ++t) {
    step(world, phenotypes, config, rngs.respawn);
  }

  GenerationResult result;
  result.scored.reserve(genomes.size());
  std::vector<int> energies, fitnesses;
  energies.reserve(genomes.size());
  fitnesses.reserve(genomes.size());
  for (std::size_t i = 0; i < genomes.size(); ++i) {
    const AgentState& agent = world.agents[i];
    result.scored.push_back({genomes[i], agent.food_eaten, agent.energy});
    energies.push_back(agent.energy);
    fitnesses.push_back(agent.food_eaten);
  }
  result.record = summarize_generation(energies, fitnesses);
  result.record.run_id = run_id;
  result.record.generation = generation;
  result.final_phenotypes = std::move(phenotypes);
  return result;
}

// Observer sees each generation's pre-lifetime genomes and its results;
// used for invariant checks and instrumentation.
using GenerationObserver = std::function<void(
    int generation, const std::vector<Genome>& genomes, const GenerationResult&)>;

inline void validate(const RegimeConfig& config) {
  if (config.generations <= 0 || config.steps_per_generation <= 0 ||
      config.population <= 0) {
    throw std::invalid_argument("RegimeConfig: counts must be positive");
  }
  if (config.learning_rate <= 0.0) {
    throw std::invalid_argument("RegimeConfig: learning rate must be positive");
  }
  if (config.mutation_rate < 0.0 || config.mutation_rate > 1.0) {
    throw std::invalid_argument("RegimeConfig: mutation rate must be in [0,1]");
  }
}

// Full run: generation 0 is random; afterwards EVO and EVO+SS evolve the
// population while SS re-randomises it (blank slates each generation).
inline std::vector<GenerationRecord> run_experiment(
    const RegimeConfig& config, int run_id = 0,
    const GenerationObserver& observer = {}) {
  validate(config);
  RunRngs rngs(config.seed);

  std::vector<Genome> genomes;
  genomes.reserve(static_cast<std::size_t>(config.population));
  for (int i = 0; i < config.population; ++i) genomes.push_back(random_genome(rngs.evo));

  std::vector<GenerationRecord> records;
  records.reserve(static_cast<std::size_t>(config.generations));
  for (int gen = 0; gen < config.generations; ++gen) {
    GenerationResult result = run_generation(genomes, config, rngs, run_id, gen);
    records.push_back(result.record);
    if (observer) observer(gen, genomes, result);

    if (gen + 1 == config.generations) break;
    if (config.mode == Mode::SS) {
      for (Genome& g : genomes) g = random_genome(rngs.evo);
    } else {
      genomes = next_generation(result.scored, rngs.evo, config.mutation_rate);
    }
  }
  return records;
}

}  // namespace miniworld
