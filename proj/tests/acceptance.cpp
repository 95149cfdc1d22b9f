// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include "qsdc/errors.hpp"
#include "qsdc/harness.hpp"
#include "qsdc/measurement.hpp"
#include "qsdc/noise_memory.hpp"
#include "qsdc/protocol.hpp"
#include "qsdc/quantum_core.hpp"
#include "qsdc/tomography.hpp"

#include "oracles.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

using namespace qsdc;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_s;
  std::function<Outcome()> check;
};

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<bool> random_bits(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<bool> bits(n);
  for (std::size_t i = 0; i < n; ++i) bits[i] = (gen() & 1) != 0;
  return bits;
}

DensityMatrix phi_plus_rho() { return DensityMatrix::from_pure(bell_state(BellLabel::PhiPlus)); }

Outcome encoding_table() {
  double worst = 0.0;
  for (unsigned v = 0; v < 4; ++v) {
    const DensityMatrix out =
        apply_local(encode_unitary(TwoBitCode::from_value(v)), Side::A, phi_plus_rho());
    worst = std::max(worst, oracle::max_diff(out.matrix(), oracle::bell_rho(static_cast<int>(v))));
  }
  return {worst <= 1e-12, fmt::format("max deviation {:.2e}", worst)};
}

Outcome hwp_states() {
  const double s = 1.0 / std::sqrt(2.0);
  Vec4 hh_minus_vv, hv_plus_vh, vh_minus_hv;
  hh_minus_vv << s, 0, 0, -s;
  hv_plus_vh << 0, s, s, 0;
  vh_minus_hv << 0, -s, s, 0;
  const Unitary2 plates[] = {hwp_unitary(0.0), hwp_unitary(std::numbers::pi / 4),
                             hwp_unitary(std::numbers::pi / 4) * hwp_unitary(0.0)};
  const Vec4* targets[] = {&hh_minus_vv, &hv_plus_vh, &vh_minus_hv};
  double worst = 0.0;
  for (int k = 0; k < 3; ++k) {
    const DensityMatrix out = apply_local(plates[k], Side::A, phi_plus_rho());
    worst = std::max(worst, max_abs_diff(out.matrix(), *targets[k] * targets[k]->adjoint()));
  }
  return {worst <= 1e-12, fmt::format("max deviation {:.2e}", worst)};
}

Outcome fidelity_reproduction() {
  const double targets[] = {0.931, 0.870, 0.920, 0.930, 0.883};
  bool ok = true;
  std::string detail;
  for (double target : targets) {
    SessionConfig config;
    config.source_noise = {ChannelKind::Depolarizing,
                           calibrate_noise(target, ChannelKind::Depolarizing)};
    const DensityMatrix state = trace_stages(config, TwoBitCode{}).back().second;
    std::vector<double> fids, sigmas;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Rng rng(Rng::derive(seed, 0, 0x746f6d6f));
      const TomoDataset data = simulate_tomography(state, 10000, rng);
      const FidelityReport r =
          fidelity_with_error(data, bell_state(BellLabel::PhiPlus), kDefaultResamples, rng);
      fids.push_back(r.fidelity);
      sigmas.push_back(r.sigma);
    }
    const double med = median(fids);
    const auto [lo, hi] = std::minmax_element(sigmas.begin(), sigmas.end());
    const bool pass = std::abs(med - target) <= 0.02 && *lo > 0.001 && *hi < 0.03;
    ok = ok && pass;
    detail += fmt::format("{}{:.3f}->{:.4f} (sigma {:.4f}..{:.4f})", detail.empty() ? "" : "; ",
                          target, med, *lo, *hi);
  }
  return {ok, detail};
}

Outcome error_rate_link() {
  SessionConfig config;
  config.n_pairs = 12500;
  config.check_fraction = 0.2;  // 10^4 message pairs
  config.source_noise = {ChannelKind::Depolarizing, calibrate_noise(0.90, ChannelKind::Depolarizing)};
  const SessionResult r = run_session(config, random_bits(20000, 4), Rng(2024));
  const std::size_t groups = 10000 - r.erasure_positions.size();
  const bool ok = r.aborted_at == AbortStage::NotAborted && groups == 10000 &&
                  std::abs(r.bit_error_rate - 0.10) <= 0.01;
  return {ok, fmt::format("group error rate {:.4f} over {} groups", r.bit_error_rate, groups)};
}

Outcome eavesdropping_detection() {
  SessionConfig big;
  big.n_pairs = 40000;
  big.check_fraction = 0.5;  // 10^4 first-check pairs
  big.eve.kind = EveKind::InterceptResend;
  big.eve.basis_policy = BasisPolicy::RandomZX;
  const SessionResult measured = run_session(big, random_bits(100, 1), Rng(77));
  const bool qber_ok = measured.check1_records >= 10000 &&
                       std::abs(measured.qber_check1 - 0.25) <= 0.02;

  SessionConfig config;
  config.n_pairs = 5000;
  config.check_fraction = 0.4;
  config.qber_threshold = 0.12;
  config.eve = big.eve;
  int aborts = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const SessionResult r = run_session(config, random_bits(1000, seed), Rng(seed));
    aborts += r.aborted_at != AbortStage::NotAborted;
  }

  config.eve = {};
  const SessionResult clean = run_session(config, random_bits(1000, 5), Rng(5));
  const bool clean_ok = clean.aborted_at == AbortStage::NotAborted && clean.qber_check1 == 0.0 &&
                        clean.qber_check2 == 0.0;

  double brute_dev = 0.0;
  const std::pair<BasisPolicy, std::vector<int>> policies[] = {
      {BasisPolicy::AlwaysZ, {0}}, {BasisPolicy::AlwaysX, {1}}, {BasisPolicy::RandomZX, {0, 1}}};
  for (const auto& [policy, bases] : policies) {
    for (int check : {0, 1}) {
      brute_dev = std::max(brute_dev,
                           std::abs(intercept_resend_qber(policy, static_cast<LocalBasis>(check)) -
                                    oracle::intercept_qber_brute_force(bases, check)));
    }
  }
  const bool brute_ok =
      brute_dev <= 1e-12 &&
      std::abs(intercept_resend_qber(BasisPolicy::RandomZX, LocalBasis::Z) - 0.25) <= 1e-12;

  return {qber_ok && aborts == 100 && clean_ok && brute_ok,
          fmt::format("QBER {:.4f} over {} checks; {}/100 aborts; clean QBER {}/{}; "
                      "brute-force deviation {:.1e}",
                      measured.qber_check1, measured.check1_records, aborts, clean.qber_check1,
                      clean.qber_check2, brute_dev)};
}

Outcome timing_constraint() {
  std::mt19937_64 gen(606);
  std::uniform_real_distribution<double> op(0.0, 500.0), dist(0.0, 100.0), speed(0.1, 0.3);
  int failures = 0, boundaries = 0, infeasible = 0;
  for (int i = 0; i < 1000; ++i) {
    SessionConfig c;
    c.n_pairs = 50;
    c.op_time_ns = op(gen);
    c.distance_m = i % 10 == 0 ? 0.0 : dist(gen);
    c.light_speed_m_per_ns = speed(gen);
    const double required = c.op_time_ns + c.distance_m / c.light_speed_m_per_ns;
    const TimingPlan plan = plan_timing(c);
    if (plan.required_ns != required) ++failures;
    // Thirds: exactly at the boundary, just below, comfortably above.
    const int mode = i % 3;
    c.storage_a_ns = mode == 0 ? required
                     : mode == 1 ? std::nextafter(required, -1.0)
                                 : required * 1.5 + 1.0;
    if (required == 0.0 && mode == 1) c.storage_a_ns = required;
    const bool should_fail = mode == 1 && required > 0.0;
    boundaries += mode == 0;
    try {
      run_session(c, {true, false}, Rng(i));
      if (should_fail) ++failures;
    } catch (const TimingError&) {
      ++infeasible;
      if (!should_fail) ++failures;
    }
  }
  return {failures == 0, fmt::format("{} violations; {} equality cases; {} rejected", failures,
                                     boundaries, infeasible)};
}

Outcome memory_model() {
  const double inf = std::numeric_limits<double>::infinity();
  struct Case {
    MemorySpec spec;
    double t;
  };
  const Case cases[] = {{{0.25, inf, 0.0}, 120.0},
                        {{0.3, 500.0, 0.0}, 120.0},
                        {{0.8, 1000.0, 0.0}, 50.0},
                        {{0.5, 200.0, 0.0}, 300.0},
                        {{1.0, 100.0, 0.0}, 10.0}};
  const int trials = 100000;
  bool ok = true;
  std::string detail;
  std::uint64_t seed = 7;
  for (const auto& c : cases) {
    Rng rng(seed++);
    int hits = 0;
    const DensityMatrix rho = phi_plus_rho();
    for (int i = 0; i < trials; ++i) hits += memory_store_retrieve(rho, Side::B, c.t, c.spec, rng).retrieved;
    const double expected = c.spec.eta0 * std::exp(-c.t / c.spec.tau_ns);
    const double se = std::sqrt(expected * (1 - expected) / trials);
    const double freq = static_cast<double>(hits) / trials;
    const double z = se > 0 ? (freq - expected) / se : 0.0;
    ok = ok && std::abs(z) <= 3.0;
    detail += fmt::format("{}{:.4f} vs {:.4f} (z={:+.2f})", detail.empty() ? "" : "; ", freq,
                          expected, z);
  }
  return {ok, detail};
}

oracle::M4 project_oracle(const oracle::M4& h) {
  Eigen::SelfAdjointEigenSolver<oracle::M4> eig(h);
  const Eigen::Vector4d w = oracle::simplex_bisection(eig.eigenvalues());
  return eig.eigenvectors() * w.cast<std::complex<double>>().asDiagonal() *
         eig.eigenvectors().adjoint();
}

Outcome tomography_round_trip() {
  std::mt19937_64 gen(808);
  double inversion = 0.0, projection = 0.0;
  for (int i = 0; i < 100; ++i) {
    const DensityMatrix rho(oracle::random_density(gen));
    inversion = std::max(inversion,
                         oracle::max_diff(linear_inversion(exact_moments(rho)), rho.matrix()));
  }
  for (int i = 0; i < 100; ++i) {
    const oracle::M4 h = oracle::random_hermitian_unit_trace(gen);
    projection = std::max(projection, oracle::max_diff(project_physical(h).matrix(), project_oracle(h)));
  }
  return {inversion <= 1e-12 && projection <= 1e-10,
          fmt::format("inversion {:.2e}; projection {:.2e}", inversion, projection)};
}

Outcome throughput() {
  SessionConfig c;
  c.n_pairs = 20000;
  c.check_fraction = 0.2;
  c.period_ms = 10.0;
  c.duty_cycles_per_period = 2600;
  c.cycle_time_ns = 500.0;
  c.memory_b = {0.25, std::numeric_limits<double>::infinity(), 0.0};
  const std::size_t message_bits = 2 * c.message_capacity_codes();

  // Tune the per-cycle success probability for 25 bits per 10 s:
  // rate = bits_per_pair * p * cycles / period.
  const double target_rate = 25.0 / 10.0;
  const double bits_per_pair =
      static_cast<double>(message_bits) * c.memory_b.efficiency(c.storage_b_ns) /
      static_cast<double>(c.n_pairs);
  const double cycles_per_s =
      static_cast<double>(c.duty_cycles_per_period) / (c.period_ms * 1e-3);
  c.pair_generation_prob = target_rate / (bits_per_pair * cycles_per_s);

  const SessionResult r = run_session(c, random_bits(message_bits, 9), Rng(99));
  return {r.aborted_at == AbortStage::NotAborted && std::abs(r.bit_rate_per_s - 2.5) <= 0.2,
          fmt::format("p_gen {:.3e}; {} bits in {:.1f} s -> {:.3f} bit/s", c.pair_generation_prob,
                      r.bits_decoded, r.simulated_time_s, r.bit_rate_per_s)};
}

#ifdef QSDC_CLI_PATH
std::pair<int, std::string> capture(const std::string& command) {
  std::string out;
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) return {-1, out};
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  return {pclose(pipe), out};
}
#endif

Outcome determinism() {
#ifndef QSDC_CLI_PATH
  return {false, "CLI binary not built"};
#else
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / fmt::format("qsdc_accept_{}", ::getpid());
  fs::create_directories(dir);
  const fs::path config = dir / "session.cfg";
  std::ofstream(config) << "n_pairs = 1000\ncheck_fraction = 0.2\nseed = 17\nmessage_length = 600\n"
                           "source_noise_kind = depol\nsource_noise_p = 0.1\ntransmittance = 0.9\n"
                           "pair_generation_prob = 0.5\n";
  const std::string cli = QSDC_CLI_PATH;
  const std::string cfg = config.string();
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"run", fmt::format("'{}' run -c '{}'", cli, cfg)},
      {"sweep", fmt::format("'{}' sweep -c '{}' --param source_noise_p --grid 0:0.2:3 --trials 2", cli, cfg)},
      {"tomo", fmt::format("'{}' tomo -c '{}' --target phi+ --shots 5000", cli, cfg)},
      {"calibrate", fmt::format("'{}' calibrate --fidelity 0.87 --channel depol", cli)},
      {"attack-demo", fmt::format("'{}' attack-demo -c '{}'", cli, cfg)},
  };
  bool ok = true;
  std::string detail;
  for (const auto& [name, command] : commands) {
    const auto first = capture(command + " 2>&1");
    const auto second = capture(command + " 2>&1");
    const bool same = first.first == 0 && second.first == 0 && !first.second.empty() &&
                      first.second == second.second;
    ok = ok && same;
    detail += fmt::format("{}{} {}", detail.empty() ? "" : "; ", name, same ? "identical" : "DIFFERS");
  }
  fs::remove_all(dir);
  return {ok, detail};
#endif
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "encoding table", 1.0, encoding_table},
      {2, "wave-plate states", 1.0, hwp_states},
      {3, "fidelity reproduction", 120.0, fidelity_reproduction},
      {4, "error rate vs fidelity", 30.0, error_rate_link},
      {5, "eavesdropping detection", 60.0, eavesdropping_detection},
      {6, "timing constraint", 5.0, timing_constraint},
      {7, "memory model", 30.0, memory_model},
      {8, "tomography round trip", 30.0, tomography_round_trip},
      {9, "throughput", 30.0, throughput},
      {10, "determinism", 60.0, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.check();
    } catch (const std::exception& e) {
      outcome = {false, fmt::format("exception: {}", e.what())};
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_budget = elapsed < c.budget_s;
    const bool pass = outcome.pass && in_budget;
    failed += !pass;
    fmt::print("{} [{:2}] {} ({:.2f} s / {:.0f} s budget{}): {}\n", pass ? "PASS" : "FAIL", c.id,
               c.name, elapsed, c.budget_s, in_budget ? "" : ", over budget", outcome.detail);
    std::fflush(stdout);
  }
  fmt::print("{}/{} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
