// Seeded RNG streams. One master seed per run; named substreams isolate the
// draw sequences of world construction, substance respawn, and the
// evolutionary operators from each other, so runs replay bit-identically.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace miniworld {

// splitmix64 finalizer, used to spread a master seed into substream seeds.
inline constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  // Substream `id` of `master`. Distinct ids give unrelated sequences.
  static RngStream substream(std::uint64_t master, std::uint64_t id) {
    return RngStream(mix64(master ^ mix64(id)));
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0,1) with 53-bit resolution. All other draws reduce to this,
  // so sequences do not depend on library distribution internals.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }

  bool bernoulli(double p) { return uniform01() < p; }

  // Uniform integer in [0, bound), bound > 0.
  std::uint64_t uniform_int(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(engine_()) * bound) >> 64);
  }

  // Standard normal via Box-Muller; consumes exactly two uniforms.
  double gaussian() {
    const double u1 = 1.0 - uniform01();  // (0,1], keeps the log finite
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

// The three per-run substreams.
struct RunRngs {
  RngStream world_init;  // agent placement + initial substance spawns
  RngStream respawn;     // replacement substances during a lifetime
  RngStream evo;         // genome init, selection, crossover, mutation

  explicit RunRngs(std::uint64_t master_seed)
      : world_init(RngStream::substream(master_seed, 1)),
        respawn(RngStream::substream(master_seed, 2)),
        evo(RngStream::substream(master_seed, 3)) {}
};

}  // namespace miniworld
