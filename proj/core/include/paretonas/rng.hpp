#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace paretonas {

/// Seeded random source with a portable draw sequence.
///
/// The standard distributions are implementation-defined, so bounded integer
/// and unit-interval draws are derived here directly from the raw 64-bit
/// engine output. The engine state round-trips through text, which is what
/// checkpoints store.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);

  /// Uniform real in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform01() < p; }

  std::string save() const;
  static Rng restore(const std::string& state);

  friend bool operator==(const Rng& a, const Rng& b) { return a.engine_ == b.engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace paretonas
