// The foraging environment: toroidal 640x640 geometry, the four map layouts,
// substance lifecycle, sensing, movement, and eating.
//
// Coordinate frame: y grows downward, angles are degrees clockwise from +x,
// headings live in [0,360).
#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "miniworld/net.hpp"
#include "miniworld/rng.hpp"

namespace miniworld {

inline constexpr double kAgentHalfSize = 5.0;      // 10x10 body
inline constexpr double kSubstanceHalfSize = 5.0;  // 10x10 body
inline constexpr double kVisualRange = 40.0;
inline constexpr double kSpawnRadius = 40.0;
inline constexpr double kTurnAngleDeg = 20.0;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

struct Rect {
  double x_min = 0.0, x_max = 0.0;
  double y_min = 0.0, y_max = 0.0;

  bool contains(Vec2 p) const {
    return p.x > x_min && p.x < x_max && p.y > y_min && p.y < y_max;
  }
};

enum class MapId { A, B, C, D };

struct MapSpec {
  MapId id = MapId::A;
  double width = 640.0;
  double height = 640.0;
  Vec2 agent_center{};
  double agent_spawn_radius = kSpawnRadius;
  Rect food_region{};
  Rect poison_region{};

  // The four paper layouts. Food sits in the same region everywhere; only the
  // agent start point and (for map D) the poison region move.
  static MapSpec standard(MapId id, double w = 640.0, double h = 640.0) {
    MapSpec m;
    m.id = id;
    m.width = w;
    m.height = h;
    switch (id) {
      case MapId::A: m.agent_center = {w / 4, h / 4}; break;
      case MapId::B: m.agent_center = {w / 4, 3 * h / 4}; break;
      case MapId::C: m.agent_center = {w / 4, h / 2}; break;
      case MapId::D: m.agent_center = {w / 2, h / 2}; break;
    }
    m.food_region = {5 * w / 8, 7 * w / 8, h / 8, 3 * h / 8};
    if (id == MapId::D) {
      m.poison_region = {w / 8, 3 * w / 8, 5 * h / 8, 7 * h / 8};
    } else {
      m.poison_region = {5 * w / 8, 7 * w / 8, 5 * h / 8, 7 * h / 8};
    }
    return m;
  }
};

enum class SubstanceKind { Food, Poison };

// 4-bit colour codes. Food and poison pairs overlap in three positions, so
// the colour channel alone does not separate the kinds.
using ColorCode = std::array<double, 4>;
inline constexpr std::array<ColorCode, 2> kFoodColors{{{1, 1, 1, 0}, {1, 1, 0, 1}}};
inline constexpr std::array<ColorCode, 2> kPoisonColors{{{0, 1, 1, 1}, {1, 0, 1, 1}}};

struct Substance {
  SubstanceKind kind = SubstanceKind::Food;
  Vec2 center{};
  ColorCode color{};
};

struct AgentState {
  Vec2 position{};
  double heading = 0.0;  // degrees in [0,360)
  double speed = 1.0;
  int energy = 0;
  int food_eaten = 0;
  int poison_eaten = 0;
};

struct WorldState {
  MapSpec map;
  std::vector<AgentState> agents;
  std::vector<Substance> substances;
  long timestep = 0;
};

inline double wrap_coordinate(double v, double extent) {
  return v - extent * std::floor(v / extent);
}

inline Vec2 wrap_position(Vec2 p, const MapSpec& map) {
  return {wrap_coordinate(p.x, map.width), wrap_coordinate(p.y, map.height)};
}

// Signed displacement of minimal magnitude on one axis. Both inputs must
// already be wrapped into [0,extent). A tie at exactly extent/2 resolves to
// the positive direction.
inline double toroidal_delta_axis(double from, double to, double extent) {
  double d = to - from;
  if (d > extent / 2) {
    d -= extent;
  } else if (d <= -extent / 2) {
    d += extent;
  }
  return d;
}

inline Vec2 toroidal_delta(Vec2 from, Vec2 to, const MapSpec& map) {
  return {toroidal_delta_axis(from.x, to.x, map.width),
          toroidal_delta_axis(from.y, to.y, map.height)};
}

inline double normalize_degrees(double deg) {
  deg = std::fmod(deg, 360.0);
  if (deg < 0) deg += 360.0;
  return deg;
}

namespace detail {

// Bearing of displacement (dx,dy) relative to `heading`, in [0,360).
inline double bearing_from_delta(double dx, double dy, double heading) {
  const double absolute = std::atan2(dy, dx) * 180.0 / std::numbers::pi;
  return normalize_degrees(absolute - heading);
}

// Sensing arcs, strict inequalities: bearings of exactly 15/45/315/345
// degrees fall outside every arc. Returns the input bit index (0 left,
// 1 front, 2 right) or -1.
inline int classify_arc(double theta) {
  if (theta < 15.0 || theta > 345.0) return 1;
  if (theta > 15.0 && theta < 45.0) return 2;
  if (theta > 315.0 && theta < 345.0) return 0;
  return -1;
}

}  // namespace detail

inline double relative_bearing(const AgentState& agent, Vec2 target,
                               const MapSpec& map) {
  const Vec2 d = toroidal_delta(agent.position, target, map);
  if (d.x == 0.0 && d.y == 0.0) {
    throw std::domain_error("relative_bearing: target coincides with agent");
  }
  return detail::bearing_from_delta(d.x, d.y, agent.heading);
}

// 7-bit sensory input: bits 0-2 flag the arc (left, front, right) of the
// nearest substance within the visual range, bits 3-6 carry its colour.
// Substances in range but outside every arc are invisible. Distance is
// centre to centre; ties go to the lowest substance index.
inline InputVector sense(const WorldState& world, const AgentState& agent,
                         double visual_range = kVisualRange) {
  const double range2 = visual_range * visual_range;
  int best_index = -1;
  int best_arc = -1;
  double best_dist2 = std::numeric_limits<double>::infinity();

  const std::size_t count = world.substances.size();
  for (std::size_t i = 0; i < count; ++i) {
    const Substance& s = world.substances[i];
    const double dx =
        toroidal_delta_axis(agent.position.x, s.center.x, world.map.width);
    if (dx > visual_range || dx < -visual_range) continue;
    const double dy =
        toroidal_delta_axis(agent.position.y, s.center.y, world.map.height);
    if (dy > visual_range || dy < -visual_range) continue;
    const double dist2 = dx * dx + dy * dy;
    if (dist2 > range2 || dist2 >= best_dist2) continue;
    if (dx == 0.0 && dy == 0.0) continue;  // direction undefined
    const int arc =
        detail::classify_arc(detail::bearing_from_delta(dx, dy, agent.heading));
    if (arc < 0) continue;
    best_index = static_cast<int>(i);
    best_arc = arc;
    best_dist2 = dist2;
  }

  InputVector input{};
  if (best_index >= 0) {
    input[best_arc] = 1.0;
    const ColorCode& color = world.substances[best_index].color;
    for (int c = 0; c < 4; ++c) input[3 + c] = color[c];
  }
  return input;
}

// Movement rules: 0 turn left 20 degrees and move, 1 move forward at double
// speed, 2 turn right 20 degrees and move, 3 reverse direction and move,
// 4 stop.
inline AgentState apply_action(AgentState agent, int action, const MapSpec& map) {
  double distance = agent.speed;
  switch (action) {
    case 0: agent.heading -= kTurnAngleDeg; break;
    case 1: distance = 2.0 * agent.speed; break;
    case 2: agent.heading += kTurnAngleDeg; break;
    case 3: agent.heading += 180.0; break;
    case 4: return agent;
    default:
      throw std::invalid_argument("apply_action: action index out of range");
  }
  agent.heading = normalize_degrees(agent.heading);
  const double rad = agent.heading * std::numbers::pi / 180.0;
  agent.position.x += distance * std::cos(rad);
  agent.position.y += distance * std::sin(rad);
  agent.position = wrap_position(agent.position, map);
  return agent;
}

// Uniform spawn inside the kind's region; colour picked uniformly from the
// kind's two codes and fixed until eaten. Draw order: x, y, colour.
inline Substance spawn_substance(SubstanceKind kind, const MapSpec& map,
                                 RngStream& rng) {
  const Rect& region =
      kind == SubstanceKind::Food ? map.food_region : map.poison_region;
  Substance s;
  s.kind = kind;
  s.center.x = rng.uniform(region.x_min, region.x_max);
  s.center.y = rng.uniform(region.y_min, region.y_max);
  const auto& palette = kind == SubstanceKind::Food ? kFoodColors : kPoisonColors;
  s.color = palette[rng.uniform_int(2)];
  return s;
}

struct EatResult {
  int energy_delta = 0;
  int food = 0;
  int poison = 0;
};

// Every substance currently overlapping the agent's body (open-interval AABB
// test on the torus) is eaten in index order and immediately replaced by a
// fresh spawn of the same kind.
inline EatResult check_eat(WorldState& world, int agent_index, RngStream& rng) {
  AgentState& agent = world.agents.at(static_cast<std::size_t>(agent_index));
  constexpr double overlap = kAgentHalfSize + kSubstanceHalfSize;
  EatResult result;
  const std::size_t count = world.substances.size();
  for (std::size_t i = 0; i < count; ++i) {
    Substance& s = world.substances[i];
    const double dx =
        toroidal_delta_axis(agent.position.x, s.center.x, world.map.width);
    if (dx >= overlap || dx <= -overlap) continue;
    const double dy =
        toroidal_delta_axis(agent.position.y, s.center.y, world.map.height);
    if (dy >= overlap || dy <= -overlap) continue;
    if (s.kind == SubstanceKind::Food) {
      ++result.food;
    } else {
      ++result.poison;
    }
    s = spawn_substance(s.kind, world.map, rng);
  }
  result.energy_delta = result.food - result.poison;
  agent.food_eaten += result.food;
  agent.poison_eaten += result.poison;
  agent.energy += result.energy_delta;
  return result;
}

// 20 agents uniform in the disc of radius `agent_spawn_radius` around the
// map's start point, all heading 0; 30 food then 30 poison. Agent draws come
// first (two uniforms each), then substances in spawn order.
inline WorldState init_world(const MapSpec& map, RngStream& rng,
                             int num_agents = 20, int num_food = 30,
                             int num_poison = 30) {
  WorldState world;
  world.map = map;
  world.agents.reserve(static_cast<std::size_t>(num_agents));
  for (int a = 0; a < num_agents; ++a) {
    const double r = map.agent_spawn_radius * std::sqrt(rng.uniform01());
    const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
    AgentState agent;
    agent.position = wrap_position(
        {map.agent_center.x + r * std::cos(phi), map.agent_center.y + r * std::sin(phi)},
        map);
    world.agents.push_back(agent);
  }
  world.substances.reserve(static_cast<std::size_t>(num_food + num_poison));
  for (int i = 0; i < num_food; ++i) {
    world.substances.push_back(spawn_substance(SubstanceKind::Food, map, rng));
  }
  for (int i = 0; i < num_poison; ++i) {
    world.substances.push_back(spawn_substance(SubstanceKind::Poison, map, rng));
  }
  return world;
}

}  // namespace miniworld
