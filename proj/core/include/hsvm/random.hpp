#pragma once

#include <cstdint>
#include <optional>
#include <random>

namespace hsvm {

// Seedable generator with platform-independent output.
//
// std::mt19937_64 is bit-exact across standard libraries, but the standard
// distributions are not, so uniforms and normals are derived here:
// uniform() takes the top 53 bits of one engine draw, normal() is the
// Box-Muller transform of two uniforms (the second variate is cached).
// Changing either derivation changes every generated dataset; bump
// kGeneratorVersion when doing so.
class Rng {
 public:
  static constexpr int kGeneratorVersion = 1;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0, 1).
  double uniform();
  // Standard normal.
  double normal();
  // Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

// Deterministic per-stream seed derivation (SplitMix64 finalizer).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace hsvm
