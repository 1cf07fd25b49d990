#pragma once

// Seeded random streams. The engine is std::mt19937_64, whose output
// sequence is fixed by the C++ standard; normals use the Box-Muller
// transform implemented here (not std::normal_distribution, whose algorithm
// is implementation-defined) so streams agree across standard libraries.
//
// Sub-seeds for independent trials come from derive_seed, a SplitMix64
// chain over (base, tags...).

#include <cstdint>
#include <initializer_list>
#include <random>

namespace fcs {

/// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

/// Deterministic sub-seed: fold each tag into the base with splitmix64.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1].
  double uniform_open_left();
  /// Standard normal via Box-Muller; the second variate is cached.
  double normal();

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace fcs
