#pragma once

#include <cstdint>
#include <random>

namespace qsdc {

// Seeded randomness handle. Every stochastic operation takes one of these
// explicitly; independent strands must use independently derived handles.
//
// Seed derivation: derive(seed, index, tag) mixes the three values with
// SplitMix64 finalizers, so child(index, tag) streams are reproducible and
// independent of the order in which they are created.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  static std::uint64_t derive(std::uint64_t seed, std::uint64_t index,
                              std::uint64_t tag);

  Rng child(std::uint64_t index, std::uint64_t tag) const;

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform();

  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t binomial(std::uint64_t n, double p);

  // Number of Bernoulli(p) trials up to and including the first success.
  std::uint64_t trials_until_success(double p);

  // Index in [0, n).
  std::uint64_t below(std::uint64_t n);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace qsdc
