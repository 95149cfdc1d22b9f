#include "qsdc/noise_memory.hpp"

#include "qsdc/errors.hpp"

#include <fmt/format.h>

#include <cmath>

namespace qsdc {
namespace {

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace

std::string_view to_string(ChannelKind kind) {
  switch (kind) {
    case ChannelKind::None: return "none";
    case ChannelKind::Depolarizing: return "depol";
    case ChannelKind::Dephasing: return "dephase";
  }
  return "?";
}

void ChannelSpec::validate() const {
  if (!is_probability(p)) {
    throw ContractViolation(fmt::format("channel probability {} outside [0, 1]", p));
  }
}

void MemorySpec::validate() const {
  if (!is_probability(eta0)) throw ContractViolation("memory eta0 outside [0, 1]");
  if (!(tau_ns > 0.0)) throw ContractViolation("memory tau_ns must be positive");
  if (!is_probability(dephase_p)) throw ContractViolation("memory dephase_p outside [0, 1]");
}

double MemorySpec::efficiency(double duration_ns) const {
  return eta0 * std::exp(-duration_ns / tau_ns);
}

DensityMatrix apply_channel(const ChannelSpec& spec, Side side, const DensityMatrix& state) {
  spec.validate();
  if (spec.kind == ChannelKind::None || spec.p == 0.0) return state;
  const Mat4& rho = state.matrix();
  Mat4 noisy;
  if (spec.kind == ChannelKind::Depolarizing) {
    const Side other = side == Side::A ? Side::B : Side::A;
    const Mat2 half_identity = 0.5 * Mat2::Identity();
    const Mat2 rest = state.reduced(other);
    noisy = side == Side::A ? kron(half_identity, rest) : kron(rest, half_identity);
  } else {
    const Mat4 z = lift(pauli::z(), side);
    noisy = z * rho * z;
  }
  return trusted_density((1.0 - spec.p) * rho + spec.p * noisy);
}

MemoryOutcome memory_store_retrieve(const DensityMatrix& state, Side side, double duration_ns,
                                    const MemorySpec& spec, Rng& rng) {
  if (!(duration_ns >= 0.0)) throw ContractViolation("storage duration must be >= 0");
  spec.validate();
  const bool retrieved = rng.uniform() < spec.efficiency(duration_ns);
  if (!retrieved) return {false, state};
  return {true, apply_channel({ChannelKind::Dephasing, spec.dephase_p}, side, state)};
}

bool transmit_photon(double transmittance, Rng& rng) {
  if (!is_probability(transmittance)) throw ContractViolation("transmittance outside [0, 1]");
  return rng.uniform() < transmittance;
}

}  // namespace qsdc
