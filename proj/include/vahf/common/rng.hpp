#pragma once

#include <cstdint>
#include <random>

namespace vahf {

/// Deterministic RNG. Only the raw mt19937_64 stream is used; uniform and
/// normal variates are derived here so results do not depend on the standard
/// library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  std::uint64_t uniform_int(std::uint64_t n);
  /// Standard normal via Box-Muller; the second variate is cached.
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// splitmix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t x);

template <typename... Parts>
std::uint64_t derive_seed(std::uint64_t base, Parts... parts) {
  std::uint64_t s = mix_seed(base);
  ((s = mix_seed(s ^ (static_cast<std::uint64_t>(parts) + 0x9e3779b97f4a7c15ULL))), ...);
  return s;
}

}  // namespace vahf
