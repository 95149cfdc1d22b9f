#pragma once

// QSDC session: block distribution of phi+ pairs, first security check,
// dense-coding encode on Alice's retrieved photon, transmission, retrieval
// of Bob's stored half, Bell-state decode and a second check on decoy pairs.

#include "qsdc/measurement.hpp"
#include "qsdc/noise_memory.hpp"
#include "qsdc/quantum_core.hpp"
#include "qsdc/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qsdc {

enum class EveKind { None, InterceptResend };
enum class BasisPolicy { AlwaysZ, AlwaysX, RandomZX };

struct EveStrategy {
  EveKind kind = EveKind::None;
  // Only consulted for InterceptResend.
  BasisPolicy basis_policy = BasisPolicy::RandomZX;
};

std::string_view to_string(EveKind kind);
std::string_view to_string(BasisPolicy policy);

struct SessionConfig {
  std::size_t n_pairs = 1000;
  double check_fraction = 0.2;
  double qber_threshold = 0.12;
  double distance_m = 0.0;
  double op_time_ns = 0.0;  // Alice's encoding time T_o
  double light_speed_m_per_ns = 0.2;
  ChannelSpec source_noise;  // on Bob's half at emission
  ChannelSpec hop_noise;     // on the travelling photon, every hop
  MemorySpec memory_a;
  MemorySpec memory_b;
  double storage_a_ns = 50.0;
  double storage_b_ns = 120.0;
  BsmMode bsm_mode = BsmMode::Ideal;
  EveStrategy eve;
  bool eve_on_encoded_hop = false;
  double transmittance = 1.0;         // per hop
  double pair_generation_prob = 1.0;  // per duty cycle
  double cycle_time_ns = 500.0;
  std::size_t duty_cycles_per_period = 2600;
  double period_ms = 10.0;

  // Throws ContractViolation naming the first offending field.
  void validate() const;

  std::size_t check_pairs() const;
  std::size_t check1_pairs() const { return check_pairs() - check_pairs() / 2; }
  std::size_t check2_pairs() const { return check_pairs() / 2; }
  std::size_t message_capacity_codes() const { return n_pairs - check_pairs(); }
};

struct TimingPlan {
  double required_ns = 0.0;  // T_o + L/c
  bool feasible = false;     // storage_a_ns >= required_ns
  double efficiency_at_required = 0.0;  // memory_a efficiency after required_ns
};

TimingPlan plan_timing(const SessionConfig& config);

struct EncodedMessage {
  std::vector<TwoBitCode> codes;
  bool padded = false;  // a trailing 0 was appended to an odd-length message
};

EncodedMessage encode_message(const std::vector<bool>& bits);
std::vector<bool> decode_message(std::span<const TwoBitCode> codes, bool padded);

// Accepts '0' and '1'; spaces and underscores are ignored.
std::vector<bool> parse_bits(std::string_view text);
std::string format_bits(const std::vector<bool>& bits);

enum class Correlation { Equal, Opposite };

struct CheckRecord {
  LocalBasis basis;
  int outcome_a;
  int outcome_b;
  Correlation expected;
};

// Correlation of Z/X outcomes on (U_code x I)|phi+>.
Correlation expected_correlation(TwoBitCode code, LocalBasis basis);

// Fraction of records that violate their expected correlation.
double estimate_qber(std::span<const CheckRecord> records);

enum class AbortStage { NotAborted, Check1, Check2 };
std::string_view to_string(AbortStage stage);

enum class Stage { Psi0LightMemory, Psi1MemoryMemory, Psi2LightMemory, Psi3PhotonPhoton, Encoded };
std::string_view to_string(Stage stage);

using StageTrace = std::vector<std::pair<Stage, DensityMatrix>>;

// Noise-only evolution of one pair carrying `code` (no loss, no eavesdropper).
StageTrace trace_stages(const SessionConfig& config, TwoBitCode code);

struct SessionResult {
  std::uint64_t seed = 0;
  std::size_t n_pairs = 0;
  double check_fraction = 0.0;
  // Empty when aborted. Otherwise one entry per message bit; bits of erased
  // codes are placeholders (false) and their code indices are listed below.
  std::vector<bool> decoded_bits;
  std::vector<std::size_t> erasure_positions;
  double qber_check1 = 0.0;  // NaN when no check pair survived
  double qber_check2 = 0.0;  // NaN when not reached or no decoy survived
  std::size_t check1_records = 0;
  std::size_t check2_records = 0;
  AbortStage aborted_at = AbortStage::NotAborted;
  std::size_t pairs_lost = 0;
  std::size_t bits_sent = 0;
  std::size_t bits_decoded = 0;  // message bits carried by non-erased codes
  std::size_t bit_errors = 0;
  std::size_t group_errors = 0;  // wrongly decoded two-bit groups
  // Fraction of decoded two-bit groups that differ from what was sent.
  double bit_error_rate = 0.0;
  double simulated_time_s = 0.0;
  double bit_rate_per_s = 0.0;
  std::optional<StageTrace> trace;
};

// Runs one session. Randomness is drawn from streams derived from
// rng.seed() by (pair index, stage tag); `rng` itself is not advanced.
// Throws CapacityError when the message needs more codes than the
// non-check pairs provide, and TimingError before any pair is used when
// plan_timing reports the storage as infeasible.
SessionResult run_session(const SessionConfig& config, const std::vector<bool>& message,
                          const Rng& rng, bool record_trace = false);

// Expected QBER of Z/X checks on phi+ when Bob's half is intercepted and
// resent with the given policy, computed exactly from density matrices.
double intercept_resend_qber(BasisPolicy policy, LocalBasis check_basis);

}  // namespace qsdc
