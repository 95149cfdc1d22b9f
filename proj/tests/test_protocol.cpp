#include "qsdc/errors.hpp"
#include "qsdc/protocol.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace qsdc;

namespace {

std::vector<bool> random_bits(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<bool> bits(n);
  for (std::size_t i = 0; i < n; ++i) bits[i] = (gen() & 1) != 0;
  return bits;
}

SessionConfig small_config() {
  SessionConfig c;
  c.n_pairs = 50;
  c.check_fraction = 0.2;
  return c;
}

}  // namespace

TEST(PlanTiming, Examples) {
  SessionConfig c;
  c.op_time_ns = 20.0;
  c.distance_m = 2.0;
  c.storage_a_ns = 30.0;
  TimingPlan p = plan_timing(c);
  EXPECT_NEAR(p.required_ns, 30.0, 1e-12);
  EXPECT_TRUE(p.feasible);  // equality is feasible
  c.storage_a_ns = 29.999;
  EXPECT_FALSE(plan_timing(c).feasible);
  c.distance_m = 0.0;
  c.op_time_ns = 0.0;
  c.storage_a_ns = 0.0;
  EXPECT_TRUE(plan_timing(c).feasible);
}

TEST(PlanTiming, EfficiencyAtRequired) {
  SessionConfig c;
  c.memory_a = {0.3, 500.0, 0.0};
  c.op_time_ns = 100.0;
  c.distance_m = 4.0;
  EXPECT_NEAR(plan_timing(c).efficiency_at_required, 0.3 * std::exp(-120.0 / 500.0), 1e-12);
}

TEST(SessionConfig, CheckSplitAndValidation) {
  SessionConfig c;
  c.n_pairs = 101;
  c.check_fraction = 0.3;
  EXPECT_EQ(c.check_pairs(), 30u);
  EXPECT_EQ(c.check1_pairs() + c.check2_pairs(), 30u);
  EXPECT_EQ(c.message_capacity_codes(), 71u);
  c.check_fraction = 1.5;
  EXPECT_THROW(c.validate(), ContractViolation);
  c.check_fraction = 0.05;
  c.n_pairs = 100;
  EXPECT_THROW(c.validate(), ContractViolation);  // only 5 checks
  c = SessionConfig{};
  c.cycle_time_ns = 5000.0;  // 2600 * 5 us > 10 ms
  EXPECT_THROW(c.validate(), ContractViolation);
}

TEST(EncodeMessage, OddLengthIsPadded) {
  const EncodedMessage e = encode_message(parse_bits("101"));
  ASSERT_EQ(e.codes.size(), 2u);
  EXPECT_EQ(e.codes[0], TwoBitCode(true, false));
  EXPECT_EQ(e.codes[1], TwoBitCode(true, false));
  EXPECT_TRUE(e.padded);
  EXPECT_EQ(format_bits(decode_message(e.codes, e.padded)), "101");
}

TEST(EncodeMessage, RoundTripRandom) {
  for (std::size_t n = 0; n < 40; ++n) {
    const auto bits = random_bits(n, n);
    const EncodedMessage e = encode_message(bits);
    EXPECT_EQ(decode_message(e.codes, e.padded), bits);
  }
  EXPECT_THROW(parse_bits("10a"), ContractViolation);
  EXPECT_EQ(format_bits(parse_bits("1 0_1")), "101");
}

TEST(ExpectedCorrelation, MatchesEncodedStates) {
  for (unsigned v = 0; v < 4; ++v) {
    const TwoBitCode code = TwoBitCode::from_value(v);
    const oracle::M4 rho = oracle::bell_rho(static_cast<int>(label_for(code)));
    for (int basis : {0, 1}) {
      const double same = oracle::joint_prob(rho, basis, 0, basis, 0) + oracle::joint_prob(rho, basis, 1, basis, 1);
      const Correlation c = expected_correlation(code, static_cast<LocalBasis>(basis));
      EXPECT_NEAR(same, c == Correlation::Equal ? 1.0 : 0.0, 1e-12) << v << " " << basis;
    }
  }
  EXPECT_THROW(expected_correlation(TwoBitCode{}, LocalBasis::Y), ContractViolation);
}

TEST(EstimateQber, Counts) {
  const std::vector<CheckRecord> r = {
      {LocalBasis::Z, 0, 0, Correlation::Equal},
      {LocalBasis::Z, 0, 1, Correlation::Equal},
      {LocalBasis::X, 1, 0, Correlation::Opposite},
      {LocalBasis::X, 1, 1, Correlation::Opposite},
  };
  EXPECT_DOUBLE_EQ(estimate_qber(r), 0.5);
  EXPECT_THROW(estimate_qber(std::span<const CheckRecord>{}), ContractViolation);
}

TEST(RunSession, IdealDeliversMessage) {
  SessionConfig c;
  c.n_pairs = 200;
  c.check_fraction = 0.2;
  const auto msg = random_bits(200, 5);
  const SessionResult r = run_session(c, msg, Rng(1));
  EXPECT_EQ(r.aborted_at, AbortStage::NotAborted);
  EXPECT_EQ(r.decoded_bits, msg);
  EXPECT_EQ(r.bit_errors, 0u);
  EXPECT_EQ(r.qber_check1, 0.0);
  EXPECT_EQ(r.qber_check2, 0.0);
  EXPECT_EQ(r.check1_records, 20u);
  EXPECT_EQ(r.check2_records, 20u);
  EXPECT_EQ(r.pairs_lost, 0u);
  EXPECT_EQ(r.bits_decoded, 200u);
  // 200 attempts at 2600 cycles per 10 ms.
  EXPECT_NEAR(r.simulated_time_s, 200.0 / 2600.0 * 0.01, 1e-15);
}

TEST(RunSession, ExhaustiveShortMessages) {
  const SessionConfig c = small_config();
  for (std::size_t k = 1; k <= 6; ++k) {
    const std::size_t total = std::size_t{1} << (2 * k);
    for (std::size_t m = 0; m < total; ++m) {
      std::vector<bool> bits(2 * k);
      for (std::size_t b = 0; b < 2 * k; ++b) bits[b] = ((m >> b) & 1) != 0;
      const SessionResult r = run_session(c, bits, Rng(m));
      ASSERT_EQ(r.decoded_bits, bits) << k << ":" << m;
    }
  }
  // Odd lengths as well.
  for (std::size_t m = 0; m < 32; ++m) {
    std::vector<bool> bits(5);
    for (std::size_t b = 0; b < 5; ++b) bits[b] = ((m >> b) & 1) != 0;
    ASSERT_EQ(run_session(c, bits, Rng(m)).decoded_bits, bits);
  }
}

TEST(RunSession, InterceptResendAborts) {
  SessionConfig c;
  c.n_pairs = 2000;
  c.check_fraction = 0.2;
  c.eve.kind = EveKind::InterceptResend;
  const SessionResult r = run_session(c, random_bits(100, 1), Rng(2));
  EXPECT_EQ(r.aborted_at, AbortStage::Check1);
  EXPECT_TRUE(r.decoded_bits.empty());
  // 200 checks: sd = sqrt(.25 * .75 / 200) ~ 0.031.
  EXPECT_NEAR(r.qber_check1, 0.25, 0.13);
}

TEST(RunSession, EveOnEncodedHopCaughtBySecondCheck) {
  SessionConfig c;
  c.n_pairs = 2000;
  c.check_fraction = 0.4;
  c.eve.kind = EveKind::InterceptResend;
  c.eve_on_encoded_hop = true;
  const SessionResult r = run_session(c, random_bits(100, 1), Rng(3));
  EXPECT_EQ(r.qber_check1, 0.0);
  EXPECT_EQ(r.aborted_at, AbortStage::Check2);
  EXPECT_GT(r.qber_check2, 0.12);
}

TEST(RunSession, WernerGroupErrorRate) {
  SessionConfig c;
  c.n_pairs = 12500;
  c.check_fraction = 0.2;
  c.source_noise = {ChannelKind::Depolarizing, 0.4 / 3.0};  // F = 0.9
  const auto msg = random_bits(20000, 9);
  const SessionResult r = run_session(c, msg, Rng(4));
  ASSERT_EQ(r.aborted_at, AbortStage::NotAborted);
  // 10^4 groups: sd = 0.003.
  EXPECT_NEAR(r.bit_error_rate, 0.1, 0.015);
  EXPECT_NEAR(r.qber_check1, 2.0 * 0.1 / 3.0, 0.05);
}

TEST(RunSession, LinearOpticsErasesHalf) {
  SessionConfig c;
  c.n_pairs = 5000;
  c.check_fraction = 0.2;
  c.bsm_mode = BsmMode::LinearOptics;
  const auto msg = random_bits(8000, 3);
  const SessionResult r = run_session(c, msg, Rng(5));
  ASSERT_EQ(r.aborted_at, AbortStage::NotAborted);
  const double frac = r.erasure_positions.size() / 4000.0;
  EXPECT_NEAR(frac, 0.5, 5 * std::sqrt(0.25 / 4000));
  EXPECT_EQ(r.bit_errors, 0u);
  EXPECT_EQ(r.bits_decoded, 8000u - 2 * r.erasure_positions.size());
}

TEST(RunSession, LossReducesDecodedBits) {
  SessionConfig c;
  c.n_pairs = 4000;
  c.check_fraction = 0.2;
  c.transmittance = 0.9;
  c.memory_b = {0.5, std::numeric_limits<double>::infinity(), 0.0};
  const SessionResult r = run_session(c, random_bits(4000, 4), Rng(6));
  ASSERT_EQ(r.aborted_at, AbortStage::NotAborted);
  // Survival per message pair: 0.9 * 0.9 * 0.5.
  EXPECT_NEAR(r.bits_decoded / 4000.0, 0.405, 0.04);
  EXPECT_EQ(r.bit_errors, 0u);
}

TEST(RunSession, Deterministic) {
  SessionConfig c;
  c.n_pairs = 500;
  c.source_noise = {ChannelKind::Depolarizing, 0.1};
  c.transmittance = 0.8;
  c.pair_generation_prob = 0.3;
  const auto msg = random_bits(300, 7);
  const SessionResult a = run_session(c, msg, Rng(42));
  const SessionResult b = run_session(c, msg, Rng(42));
  EXPECT_EQ(a.decoded_bits, b.decoded_bits);
  EXPECT_EQ(a.erasure_positions, b.erasure_positions);
  EXPECT_EQ(a.simulated_time_s, b.simulated_time_s);
  EXPECT_EQ(a.qber_check1, b.qber_check1);
  const SessionResult d = run_session(c, msg, Rng(43));
  EXPECT_NE(a.simulated_time_s, d.simulated_time_s);
}

TEST(RunSession, TimingFailsFast) {
  SessionConfig c = small_config();
  c.distance_m = 100.0;  // 500 ns of flight
  c.storage_a_ns = 50.0;
  EXPECT_THROW(run_session(c, {true}, Rng(1)), TimingError);
}

TEST(RunSession, CapacityError) {
  const SessionConfig c = small_config();  // 40 codes
  EXPECT_NO_THROW(run_session(c, random_bits(80, 1), Rng(1)));
  EXPECT_THROW(run_session(c, random_bits(81, 1), Rng(1)), CapacityError);
}

TEST(RunSession, TraceStagesInOrder) {
  SessionConfig c = small_config();
  c.source_noise = {ChannelKind::Depolarizing, 0.1};
  c.memory_b.dephase_p = 0.05;
  const SessionResult r = run_session(c, {true, true}, Rng(1), true);
  ASSERT_TRUE(r.trace.has_value());
  ASSERT_EQ(r.trace->size(), 5u);
  const Stage order[] = {Stage::Psi0LightMemory, Stage::Psi1MemoryMemory, Stage::Psi2LightMemory,
                         Stage::Psi3PhotonPhoton, Stage::Encoded};
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ((*r.trace)[i].first, order[i]);
  const DensityMatrix& last = r.trace->back().second;
  const double f = fidelity(last, bell_state(BellLabel::PsiMinus));
  EXPECT_NEAR(f, (1 - 0.075) * 0.95 + 0.025 * 0.05, 1e-12);
  EXPECT_FALSE(run_session(c, {true}, Rng(1)).trace.has_value());
}

TEST(RunSession, NoCheckSurvivorsAborts) {
  SessionConfig c = small_config();
  c.transmittance = 0.0;
  const SessionResult r = run_session(c, {true}, Rng(1));
  EXPECT_EQ(r.aborted_at, AbortStage::Check1);
  EXPECT_TRUE(std::isnan(r.qber_check1));
}

TEST(InterceptResendQber, MatchesBruteForce) {
  const std::pair<BasisPolicy, std::vector<int>> policies[] = {
      {BasisPolicy::AlwaysZ, {0}}, {BasisPolicy::AlwaysX, {1}}, {BasisPolicy::RandomZX, {0, 1}}};
  for (const auto& [policy, bases] : policies) {
    for (int check : {0, 1}) {
      EXPECT_NEAR(intercept_resend_qber(policy, static_cast<LocalBasis>(check)),
                  oracle::intercept_qber_brute_force(bases, check), 1e-12);
    }
  }
  EXPECT_NEAR(intercept_resend_qber(BasisPolicy::RandomZX, LocalBasis::Z), 0.25, 1e-12);
  EXPECT_NEAR(intercept_resend_qber(BasisPolicy::AlwaysZ, LocalBasis::X), 0.5, 1e-12);
}
