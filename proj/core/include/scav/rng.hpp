#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

namespace scav {

/// SplitMix64 finalizer. Used to derive decorrelated seed streams.
std::uint64_t mix64(std::uint64_t x);

/// Folds an arbitrary list of stream identifiers into one seed.
/// Deterministic and order-sensitive, so (master, env, trial) and
/// (master, trial, env) give independent streams.
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts);

/// Deterministic RNG: mt19937_64 core (whose output sequence the standard
/// pins down) with hand-rolled value transforms, because the std
/// distributions are implementation-defined and would break cross-platform
/// reproducibility.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [lo, hi], inclusive, unbiased (rejection sampling).
  int uniform_int(int lo, int hi);

  /// Exponential with rate 1.
  double exponential();

  /// Index drawn from an (unnormalized-tolerant) categorical distribution.
  int categorical(std::span<const double> probs);

  /// `count` distinct indices from [0, population), in sampling order.
  std::vector<int> sample_without_replacement(int population, int count);

  /// Flat Dirichlet over `count` cells (normalized unit exponentials).
  std::vector<double> dirichlet_flat(int count);

 private:
  std::mt19937_64 gen_;
};

}  // namespace scav
