#include "qsdc/rng.hpp"

#include "qsdc/errors.hpp"

namespace qsdc {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

std::uint64_t Rng::derive(std::uint64_t seed, std::uint64_t index,
                          std::uint64_t tag) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ index);
  return splitmix64(h ^ (tag * 0xd6e8feb86659fd93ULL));
}

Rng Rng::child(std::uint64_t index, std::uint64_t tag) const {
  return Rng(derive(seed_, index, tag));
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::binomial(std::uint64_t n, double p) {
  if (n == 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  std::binomial_distribution<std::uint64_t> dist(n, p);
  return dist(engine_);
}

std::uint64_t Rng::trials_until_success(double p) {
  if (!(p > 0.0) || p > 1.0) {
    throw ContractViolation("success probability must lie in (0, 1]");
  }
  if (p == 1.0) return 1;
  std::geometric_distribution<std::uint64_t> dist(p);
  return dist(engine_) + 1;
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw ContractViolation("below(0) has no valid outcome");
  std::uniform_int_distribution<std::uint64_t> dist(0, n - 1);
  return dist(engine_);
}

}  // namespace qsdc
