#pragma once

#include "qsdc/quantum_core.hpp"
#include "qsdc/rng.hpp"

#include <limits>
#include <string_view>

namespace qsdc {

enum class ChannelKind { None, Depolarizing, Dephasing };

std::string_view to_string(ChannelKind kind);

struct ChannelSpec {
  ChannelKind kind = ChannelKind::None;
  double p = 0.0;

  // Throws ContractViolation if p is outside [0, 1].
  void validate() const;
};

// Retrieval efficiency eta(t) = eta0 * exp(-t / tau_ns); each successful
// retrieval dephases the stored qubit with probability dephase_p.
struct MemorySpec {
  double eta0 = 1.0;
  double tau_ns = std::numeric_limits<double>::infinity();
  double dephase_p = 0.0;

  void validate() const;
  double efficiency(double duration_ns) const;
};

// Depolarizing: (1 - p) rho + p * (I/2 on `side`) x (reduced state of the
// other side). Dephasing: (1 - p) rho + p Z rho Z with Z acting on `side`.
DensityMatrix apply_channel(const ChannelSpec& spec, Side side, const DensityMatrix& state);

struct MemoryOutcome {
  bool retrieved;
  // Unchanged input when !retrieved; callers must discard the pair.
  DensityMatrix state;
};

// The success draw consumes exactly one uniform from `rng` and never looks
// at the state.
MemoryOutcome memory_store_retrieve(const DensityMatrix& state, Side side, double duration_ns,
                                    const MemorySpec& spec, Rng& rng);

bool transmit_photon(double transmittance, Rng& rng);

}  // namespace qsdc
