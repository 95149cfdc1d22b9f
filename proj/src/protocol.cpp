#include "qsdc/protocol.hpp"

#include "qsdc/errors.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>
#include <numeric>

namespace qsdc {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Per-stage stream tags; each (pair, tag) pair owns an independent stream.
enum Tag : std::uint64_t {
  kRoles = 1,
  kGeneration,
  kDistributionLoss,
  kEveDistribution,
  kMemoryA,
  kMemoryB,
  kCheck,
  kDecoyCode,
  kEncodedLoss,
  kEveEncoded,
  kDecode,
};

bool in_unit(double p) { return p >= 0.0 && p <= 1.0; }

void require(bool ok, std::string_view what) {
  if (!ok) throw ContractViolation(std::string(what));
}

LocalBasis eve_basis(BasisPolicy policy, Rng& rng) {
  switch (policy) {
    case BasisPolicy::AlwaysZ: return LocalBasis::Z;
    case BasisPolicy::AlwaysX: return LocalBasis::X;
    case BasisPolicy::RandomZX: break;
  }
  return rng.bernoulli(0.5) ? LocalBasis::X : LocalBasis::Z;
}

// Photon loss, hop noise and (optionally) interception on one hop.
struct Hop {
  bool arrived;
  DensityMatrix state;
};

Hop traverse(const SessionConfig& config, Side side, const DensityMatrix& state, bool eve_here,
             Rng& loss_rng, Rng& eve_rng) {
  DensityMatrix rho = apply_channel(config.hop_noise, side, state);
  const bool arrived = transmit_photon(config.transmittance, loss_rng);
  if (arrived && eve_here && config.eve.kind == EveKind::InterceptResend) {
    const LocalBasis basis = eve_basis(config.eve.basis_policy, eve_rng);
    rho = measure_and_resend(rho, side, basis, eve_rng).post_state;
  }
  return {arrived, rho};
}

CheckRecord measure_check(const DensityMatrix& state, Correlation expected_for_z,
                          Correlation expected_for_x, Rng& rng) {
  const LocalBasis basis = rng.bernoulli(0.5) ? LocalBasis::X : LocalBasis::Z;
  const int outcome = sample_index(outcome_probs(state, basis, basis), rng);
  return {basis, outcome / 2, outcome % 2,
          basis == LocalBasis::Z ? expected_for_z : expected_for_x};
}

enum class Role { Check1, Check2, Message };

std::vector<Role> assign_roles(const SessionConfig& config, const Rng& rng) {
  std::vector<Role> roles(config.n_pairs, Role::Message);
  std::vector<std::size_t> order(config.n_pairs);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng stream = rng.child(0, kRoles);
  // Partial Fisher-Yates: the first check_pairs() slots become checks.
  const std::size_t checks = config.check_pairs();
  for (std::size_t i = 0; i < checks; ++i) {
    const std::size_t j = i + stream.below(config.n_pairs - i);
    std::swap(order[i], order[j]);
    roles[order[i]] = i < config.check1_pairs() ? Role::Check1 : Role::Check2;
  }
  return roles;
}

}  // namespace

std::string_view to_string(EveKind kind) {
  return kind == EveKind::None ? "none" : "intercept_resend";
}

std::string_view to_string(BasisPolicy policy) {
  switch (policy) {
    case BasisPolicy::AlwaysZ: return "always_z";
    case BasisPolicy::AlwaysX: return "always_x";
    case BasisPolicy::RandomZX: return "random_zx";
  }
  return "?";
}

std::string_view to_string(AbortStage stage) {
  switch (stage) {
    case AbortStage::NotAborted: return "none";
    case AbortStage::Check1: return "check1";
    case AbortStage::Check2: return "check2";
  }
  return "?";
}

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::Psi0LightMemory: return "psi0_light_memory";
    case Stage::Psi1MemoryMemory: return "psi1_memory_memory";
    case Stage::Psi2LightMemory: return "psi2_light_memory";
    case Stage::Psi3PhotonPhoton: return "psi3_photon_photon";
    case Stage::Encoded: return "encoded";
  }
  return "?";
}

void SessionConfig::validate() const {
  require(n_pairs > 0, "n_pairs must be positive");
  require(check_fraction > 0.0 && check_fraction < 1.0, "check_fraction must lie in (0, 1)");
  require(qber_threshold > 0.0 && qber_threshold < 1.0, "qber_threshold must lie in (0, 1)");
  require(distance_m >= 0.0, "distance_m must be >= 0");
  require(op_time_ns >= 0.0, "op_time_ns must be >= 0");
  require(light_speed_m_per_ns > 0.0, "light_speed_m_per_ns must be positive");
  source_noise.validate();
  hop_noise.validate();
  memory_a.validate();
  memory_b.validate();
  require(storage_a_ns >= 0.0, "storage_a_ns must be >= 0");
  require(storage_b_ns >= 0.0, "storage_b_ns must be >= 0");
  require(in_unit(transmittance), "transmittance must lie in [0, 1]");
  require(pair_generation_prob > 0.0 && pair_generation_prob <= 1.0,
          "pair_generation_prob must lie in (0, 1]");
  require(cycle_time_ns > 0.0, "cycle_time_ns must be positive");
  require(duty_cycles_per_period > 0, "duty_cycles_per_period must be positive");
  require(period_ms > 0.0, "period_ms must be positive");
  require(cycle_time_ns * static_cast<double>(duty_cycles_per_period) <= period_ms * 1e6,
          "duty cycles do not fit in one period");
  require(check_fraction * static_cast<double>(n_pairs) >= 10.0,
          "check_fraction * n_pairs must be at least 10");
}

std::size_t SessionConfig::check_pairs() const {
  return static_cast<std::size_t>(std::llround(check_fraction * static_cast<double>(n_pairs)));
}

TimingPlan plan_timing(const SessionConfig& config) {
  TimingPlan plan;
  plan.required_ns = config.op_time_ns + config.distance_m / config.light_speed_m_per_ns;
  plan.feasible = config.storage_a_ns >= plan.required_ns;
  plan.efficiency_at_required = config.memory_a.efficiency(plan.required_ns);
  return plan;
}

EncodedMessage encode_message(const std::vector<bool>& bits) {
  EncodedMessage out;
  out.padded = bits.size() % 2 == 1;
  out.codes.reserve((bits.size() + 1) / 2);
  for (std::size_t i = 0; i < bits.size(); i += 2) {
    const bool second = i + 1 < bits.size() ? bits[i + 1] : false;
    out.codes.emplace_back(bits[i], second);
  }
  return out;
}

std::vector<bool> decode_message(std::span<const TwoBitCode> codes, bool padded) {
  std::vector<bool> bits;
  bits.reserve(2 * codes.size());
  for (auto code : codes) {
    bits.push_back(code.first());
    bits.push_back(code.second());
  }
  if (padded && !bits.empty()) bits.pop_back();
  return bits;
}

std::vector<bool> parse_bits(std::string_view text) {
  std::vector<bool> bits;
  for (char ch : text) {
    if (ch == '0' || ch == '1') {
      bits.push_back(ch == '1');
    } else if (ch != ' ' && ch != '_') {
      throw ContractViolation(fmt::format("invalid bit character '{}'", ch));
    }
  }
  return bits;
}

std::string format_bits(const std::vector<bool>& bits) {
  std::string out;
  out.reserve(bits.size());
  for (bool b : bits) out.push_back(b ? '1' : '0');
  return out;
}

Correlation expected_correlation(TwoBitCode code, LocalBasis basis) {
  switch (basis) {
    case LocalBasis::Z: return code.first() ? Correlation::Opposite : Correlation::Equal;
    case LocalBasis::X: return code.second() ? Correlation::Opposite : Correlation::Equal;
    case LocalBasis::Y: break;
  }
  throw ContractViolation("security checks use Z or X bases only");
}

double estimate_qber(std::span<const CheckRecord> records) {
  if (records.empty()) throw ContractViolation("estimate_qber needs at least one record");
  std::size_t violations = 0;
  for (const auto& r : records) {
    const bool equal = r.outcome_a == r.outcome_b;
    if (equal != (r.expected == Correlation::Equal)) ++violations;
  }
  return static_cast<double>(violations) / static_cast<double>(records.size());
}

StageTrace trace_stages(const SessionConfig& config, TwoBitCode code) {
  StageTrace trace;
  DensityMatrix rho = apply_channel(config.source_noise, Side::B,
                                    DensityMatrix::from_pure(bell_state(BellLabel::PhiPlus)));
  trace.emplace_back(Stage::Psi0LightMemory, rho);
  rho = apply_channel(config.hop_noise, Side::B, rho);
  trace.emplace_back(Stage::Psi1MemoryMemory, rho);
  rho = apply_channel({ChannelKind::Dephasing, config.memory_a.dephase_p}, Side::A, rho);
  trace.emplace_back(Stage::Psi2LightMemory, rho);
  rho = apply_channel({ChannelKind::Dephasing, config.memory_b.dephase_p}, Side::B, rho);
  trace.emplace_back(Stage::Psi3PhotonPhoton, rho);
  rho = apply_channel(config.hop_noise, Side::A, apply_local(encode_unitary(code), Side::A, rho));
  trace.emplace_back(Stage::Encoded, rho);
  return trace;
}

SessionResult run_session(const SessionConfig& config, const std::vector<bool>& message,
                          const Rng& rng, bool record_trace) {
  config.validate();
  const TimingPlan timing = plan_timing(config);
  if (!timing.feasible) {
    throw TimingError(fmt::format("storage_a_ns = {} is below the required T_o + L/c = {} ns",
                                  config.storage_a_ns, timing.required_ns));
  }
  const EncodedMessage encoded = encode_message(message);
  if (encoded.codes.size() > config.message_capacity_codes()) {
    throw CapacityError(fmt::format("message needs {} pairs but only {} are available",
                                    encoded.codes.size(), config.message_capacity_codes()));
  }

  SessionResult result;
  result.seed = rng.seed();
  result.n_pairs = config.n_pairs;
  result.check_fraction = config.check_fraction;
  result.bits_sent = message.size();
  result.qber_check2 = kNaN;
  if (record_trace) {
    result.trace = trace_stages(config, encoded.codes.empty() ? TwoBitCode{} : encoded.codes[0]);
  }

  const std::vector<Role> roles = assign_roles(config, rng);
  const DensityMatrix source = apply_channel(
      config.source_noise, Side::B, DensityMatrix::from_pure(bell_state(BellLabel::PhiPlus)));

  // Distribution of Bob's halves, storage in both memories, retrieval of
  // Alice's half. Every pair consumes duty cycles whether or not it survives.
  struct Pair {
    bool alive;
    DensityMatrix state;
  };
  std::vector<Pair> pairs;
  pairs.reserve(config.n_pairs);
  std::uint64_t attempts = 0;
  for (std::size_t i = 0; i < config.n_pairs; ++i) {
    Rng gen = rng.child(i, kGeneration);
    attempts += gen.trials_until_success(config.pair_generation_prob);
    Rng loss = rng.child(i, kDistributionLoss);
    Rng eve = rng.child(i, kEveDistribution);
    Hop hop = traverse(config, Side::B, source, !config.eve_on_encoded_hop, loss, eve);
    Rng mem_a = rng.child(i, kMemoryA);
    MemoryOutcome stored = memory_store_retrieve(hop.state, Side::A, config.storage_a_ns,
                                                 config.memory_a, mem_a);
    pairs.push_back({hop.arrived && stored.retrieved, stored.state});
  }
  result.simulated_time_s = static_cast<double>(attempts) /
                            static_cast<double>(config.duty_cycles_per_period) *
                            config.period_ms * 1e-3;

  auto retrieve_b = [&](std::size_t i, const DensityMatrix& state) {
    Rng mem_b = rng.child(i, kMemoryB);
    return memory_store_retrieve(state, Side::B, config.storage_b_ns, config.memory_b, mem_b);
  };

  // First security check on the unencoded pairs.
  std::vector<CheckRecord> check1;
  for (std::size_t i = 0; i < config.n_pairs; ++i) {
    if (roles[i] != Role::Check1) continue;
    if (!pairs[i].alive) {
      ++result.pairs_lost;
      continue;
    }
    const MemoryOutcome bob = retrieve_b(i, pairs[i].state);
    if (!bob.retrieved) {
      ++result.pairs_lost;
      continue;
    }
    Rng stream = rng.child(i, kCheck);
    check1.push_back(measure_check(bob.state, Correlation::Equal, Correlation::Equal, stream));
  }
  result.check1_records = check1.size();
  result.qber_check1 = check1.empty() ? kNaN : estimate_qber(check1);
  if (check1.empty() || result.qber_check1 > config.qber_threshold) {
    result.aborted_at = AbortStage::Check1;
    return result;
  }

  // Encode, send Alice's photons, retrieve Bob's halves, decode; decoys
  // carry random codes revealed afterwards for the second check.
  std::vector<CheckRecord> check2;
  std::vector<TwoBitCode> decoded(encoded.codes.size());
  std::vector<bool> erased(encoded.codes.size(), false);
  std::size_t next_code = 0;
  for (std::size_t i = 0; i < config.n_pairs; ++i) {
    if (roles[i] == Role::Check1) continue;
    const bool is_message = roles[i] == Role::Message;
    if (is_message && next_code >= encoded.codes.size()) continue;  // idle pair
    const std::size_t code_index = is_message ? next_code++ : 0;
    TwoBitCode code;
    if (is_message) {
      code = encoded.codes[code_index];
    } else {
      Rng decoy = rng.child(i, kDecoyCode);
      code = TwoBitCode::from_value(static_cast<unsigned>(decoy.below(4)));
    }

    bool alive = pairs[i].alive;
    DensityMatrix rho = apply_local(encode_unitary(code), Side::A, pairs[i].state);
    Rng loss = rng.child(i, kEncodedLoss);
    Rng eve = rng.child(i, kEveEncoded);
    Hop hop = traverse(config, Side::A, rho, config.eve_on_encoded_hop, loss, eve);
    alive = alive && hop.arrived;
    const MemoryOutcome bob = retrieve_b(i, hop.state);
    alive = alive && bob.retrieved;

    if (!alive) {
      ++result.pairs_lost;
      if (is_message) erased[code_index] = true;
      continue;
    }
    if (is_message) {
      Rng stream = rng.child(i, kDecode);
      const BsmOutcome outcome = bsm(bob.state, config.bsm_mode, stream);
      if (outcome == BsmOutcome::Erasure) {
        erased[code_index] = true;
      } else {
        decoded[code_index] = code_for(static_cast<BellLabel>(outcome));
      }
    } else {
      Rng stream = rng.child(i, kCheck);
      check2.push_back(measure_check(bob.state, expected_correlation(code, LocalBasis::Z),
                                     expected_correlation(code, LocalBasis::X), stream));
    }
  }
  result.check2_records = check2.size();
  result.qber_check2 = check2.empty() ? kNaN : estimate_qber(check2);
  if (check2.empty() || result.qber_check2 > config.qber_threshold) {
    result.aborted_at = AbortStage::Check2;
    return result;
  }

  result.decoded_bits = decode_message(decoded, encoded.padded);
  std::size_t decoded_groups = 0;
  for (std::size_t c = 0; c < encoded.codes.size(); ++c) {
    const std::size_t first_bit = 2 * c;
    const std::size_t width = std::min<std::size_t>(2, message.size() - first_bit);
    if (erased[c]) {
      result.erasure_positions.push_back(c);
      for (std::size_t k = 0; k < width; ++k) result.decoded_bits[first_bit + k] = false;
      continue;
    }
    ++decoded_groups;
    result.bits_decoded += width;
    std::size_t wrong = 0;
    for (std::size_t k = 0; k < width; ++k) {
      if (result.decoded_bits[first_bit + k] != message[first_bit + k]) ++wrong;
    }
    // A padded final group is judged on its real bit plus the agreed 0 pad.
    if (!(encoded.codes[c] == decoded[c])) ++result.group_errors;
    result.bit_errors += wrong;
  }
  result.bit_error_rate =
      decoded_groups == 0 ? 0.0
                          : static_cast<double>(result.group_errors) /
                                static_cast<double>(decoded_groups);
  result.bit_rate_per_s = result.simulated_time_s > 0.0
                              ? static_cast<double>(result.bits_decoded) / result.simulated_time_s
                              : 0.0;
  return result;
}

double intercept_resend_qber(BasisPolicy policy, LocalBasis check_basis) {
  const DensityMatrix phi = DensityMatrix::from_pure(bell_state(BellLabel::PhiPlus));
  std::vector<std::pair<double, LocalBasis>> eve_bases;
  switch (policy) {
    case BasisPolicy::AlwaysZ: eve_bases = {{1.0, LocalBasis::Z}}; break;
    case BasisPolicy::AlwaysX: eve_bases = {{1.0, LocalBasis::X}}; break;
    case BasisPolicy::RandomZX: eve_bases = {{0.5, LocalBasis::Z}, {0.5, LocalBasis::X}}; break;
  }
  Mat4 mixed = Mat4::Zero();
  for (const auto& [weight, basis] : eve_bases) {
    for (int k = 0; k < 2; ++k) {
      const Eigen::Vector2cd v = basis_vector(basis, k);
      const Mat4 projector = lift(v * v.adjoint(), Side::B);
      mixed += weight * projector * phi.matrix() * projector;
    }
  }
  const Probs4 p = outcome_probs(trusted_density(mixed), check_basis, check_basis);
  return p[1] + p[2];
}

}  // namespace qsdc
