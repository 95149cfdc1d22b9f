#include "qsdc/harness.hpp"

#include "qsdc/errors.hpp"
#include "text_util.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <functional>
#include <future>
#include <map>
#include <sstream>

namespace qsdc {
namespace {

constexpr std::uint64_t kMessageTag = 0x6d7367;
constexpr std::uint64_t kTomoTag = 0x746f6d6f;

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw std::invalid_argument(fmt::format("invalid value '{}' for key '{}'", value, key));
}

double to_double(std::string_view key, std::string_view value) {
  double out = 0.0;
  if (!detail::try_parse(value, out)) bad_value(key, value);
  return out;
}

std::size_t to_count(std::string_view key, std::string_view value) {
  std::size_t out = 0;
  if (!detail::try_parse(value, out)) bad_value(key, value);
  return out;
}

bool to_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  bad_value(key, value);
}

ChannelKind to_channel_kind(std::string_view key, std::string_view value) {
  for (auto kind : {ChannelKind::None, ChannelKind::Depolarizing, ChannelKind::Dephasing}) {
    if (value == to_string(kind)) return kind;
  }
  bad_value(key, value);
}

using Setter = std::function<void(RunConfig&, std::string_view, std::string_view)>;

template <typename Field>
Setter number(Field field) {
  return [field](RunConfig& c, std::string_view k, std::string_view v) {
    std::invoke(field, c) = to_double(k, v);
  };
}

template <typename Field>
Setter count(Field field) {
  return [field](RunConfig& c, std::string_view k, std::string_view v) {
    std::invoke(field, c) = to_count(k, v);
  };
}

void add_channel(std::map<std::string, Setter, std::less<>>& table, const std::string& prefix,
                 ChannelSpec SessionConfig::*member) {
  table[prefix + "_kind"] = [member](RunConfig& c, std::string_view k, std::string_view v) {
    (c.session.*member).kind = to_channel_kind(k, v);
  };
  table[prefix + "_p"] = [member](RunConfig& c, std::string_view k, std::string_view v) {
    (c.session.*member).p = to_double(k, v);
  };
}

void add_memory(std::map<std::string, Setter, std::less<>>& table, const std::string& prefix,
                MemorySpec SessionConfig::*member) {
  table[prefix + "_eta0"] = [member](RunConfig& c, std::string_view k, std::string_view v) {
    (c.session.*member).eta0 = to_double(k, v);
  };
  table[prefix + "_tau_ns"] = [member](RunConfig& c, std::string_view k, std::string_view v) {
    (c.session.*member).tau_ns = to_double(k, v);
  };
  table[prefix + "_dephase_p"] = [member](RunConfig& c, std::string_view k, std::string_view v) {
    (c.session.*member).dephase_p = to_double(k, v);
  };
}

const std::map<std::string, Setter, std::less<>>& setters() {
  static const auto table = [] {
    std::map<std::string, Setter, std::less<>> t;
    t["n_pairs"] = [](RunConfig& c, std::string_view k, std::string_view v) {
      c.session.n_pairs = to_count(k, v);
    };
    t["check_fraction"] = number([](RunConfig& c) -> double& { return c.session.check_fraction; });
    t["qber_threshold"] = number([](RunConfig& c) -> double& { return c.session.qber_threshold; });
    t["distance_m"] = number([](RunConfig& c) -> double& { return c.session.distance_m; });
    t["op_time_ns"] = number([](RunConfig& c) -> double& { return c.session.op_time_ns; });
    t["light_speed_m_per_ns"] =
        number([](RunConfig& c) -> double& { return c.session.light_speed_m_per_ns; });
    add_channel(t, "source_noise", &SessionConfig::source_noise);
    add_channel(t, "hop_noise", &SessionConfig::hop_noise);
    add_memory(t, "memory_a", &SessionConfig::memory_a);
    add_memory(t, "memory_b", &SessionConfig::memory_b);
    t["storage_a_ns"] = number([](RunConfig& c) -> double& { return c.session.storage_a_ns; });
    t["storage_b_ns"] = number([](RunConfig& c) -> double& { return c.session.storage_b_ns; });
    t["bsm_mode"] = [](RunConfig& c, std::string_view k, std::string_view v) {
      if (v == "ideal") {
        c.session.bsm_mode = BsmMode::Ideal;
      } else if (v == "linear_optics") {
        c.session.bsm_mode = BsmMode::LinearOptics;
      } else {
        bad_value(k, v);
      }
    };
    t["eve_kind"] = [](RunConfig& c, std::string_view k, std::string_view v) {
      if (v == to_string(EveKind::None)) {
        c.session.eve.kind = EveKind::None;
      } else if (v == to_string(EveKind::InterceptResend)) {
        c.session.eve.kind = EveKind::InterceptResend;
      } else {
        bad_value(k, v);
      }
    };
    t["eve_basis_policy"] = [](RunConfig& c, std::string_view k, std::string_view v) {
      for (auto p : {BasisPolicy::AlwaysZ, BasisPolicy::AlwaysX, BasisPolicy::RandomZX}) {
        if (v == to_string(p)) {
          c.session.eve.basis_policy = p;
          return;
        }
      }
      bad_value(k, v);
    };
    t["eve_on_encoded_hop"] = [](RunConfig& c, std::string_view k, std::string_view v) {
      c.session.eve_on_encoded_hop = to_bool(k, v);
    };
    t["transmittance"] = number([](RunConfig& c) -> double& { return c.session.transmittance; });
    t["pair_generation_prob"] =
        number([](RunConfig& c) -> double& { return c.session.pair_generation_prob; });
    t["cycle_time_ns"] = number([](RunConfig& c) -> double& { return c.session.cycle_time_ns; });
    t["duty_cycles_per_period"] =
        count([](RunConfig& c) -> std::size_t& { return c.session.duty_cycles_per_period; });
    t["period_ms"] = number([](RunConfig& c) -> double& { return c.session.period_ms; });
    t["seed"] = [](RunConfig& c, std::string_view k, std::string_view v) {
      std::uint64_t seed = 0;
      if (!detail::try_parse(v, seed)) bad_value(k, v);
      c.seed = seed;
    };
    t["message"] = [](RunConfig& c, std::string_view k, std::string_view v) {
      try {
        c.message = parse_bits(v);
      } catch (const ContractViolation&) {
        bad_value(k, v);
      }
    };
    t["message_length"] = count([](RunConfig& c) -> std::size_t& { return c.message_length; });
    t["tomo_resamples"] = count([](RunConfig& c) -> std::size_t& { return c.tomo_resamples; });
    return t;
  }();
  return table;
}

std::string fmt_double(double v) { return fmt::format("{}", v); }

SessionResult run_with_seed(const RunConfig& config, std::uint64_t seed) {
  RunConfig seeded = config;
  seeded.seed = seed;
  return run_session(seeded.session, session_message(seeded), Rng(seed));
}

}  // namespace

ConfigParseError::ConfigParseError(std::size_t line, const std::string& what)
    : std::runtime_error(fmt::format("line {}: {}", line, what)), line_(line) {}

void RunConfig::validate() const {
  try {
    session.validate();
  } catch (const ContractViolation& e) {
    throw ConfigValidationError(e.what());
  }
  if (tomo_resamples < kMinResamples) {
    throw ConfigValidationError(fmt::format("tomo_resamples must be at least {}", kMinResamples));
  }
}

void set_config_value(RunConfig& config, std::string_view key, std::string_view value) {
  const auto& table = setters();
  const auto it = table.find(key);
  if (it == table.end()) throw std::invalid_argument(fmt::format("unknown key '{}'", key));
  it->second(config, key, value);
}

const std::vector<std::string_view>& config_keys() {
  static const std::vector<std::string_view> keys = [] {
    std::vector<std::string_view> out;
    for (const auto& [k, _] : setters()) out.push_back(k);
    return out;
  }();
  return keys;
}

RunConfig parse_run_config(std::string_view text) {
  RunConfig config;
  std::size_t line_no = 0;
  for (std::string_view line : detail::split(text, '\n')) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigParseError(line_no, "expected 'key = value'");
    }
    const auto key = detail::trim(line.substr(0, eq));
    const auto value = detail::trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigParseError(line_no, "expected 'key = value'");
    }
    try {
      set_config_value(config, key, value);
    } catch (const std::invalid_argument& e) {
      throw ConfigParseError(line_no, e.what());
    }
  }
  config.validate();
  return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigParseError(0, fmt::format("cannot open '{}'", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_run_config(buffer.str());
}

std::vector<bool> session_message(const RunConfig& config) {
  if (!config.message.empty()) return config.message;
  Rng rng = Rng(config.seed).child(0, kMessageTag);
  std::vector<bool> bits(config.message_length);
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = rng.bernoulli(0.5);
  return bits;
}

double calibrate_noise(double target_fidelity, ChannelKind kind) {
  if (kind == ChannelKind::None) throw ContractViolation("cannot calibrate a noiseless channel");
  if (!(target_fidelity > 0.25 && target_fidelity <= 1.0)) {
    throw ContractViolation(
        fmt::format("target fidelity {} outside (0.25, 1]", target_fidelity));
  }
  const DensityMatrix phi = DensityMatrix::from_pure(bell_state(BellLabel::PhiPlus));
  const PureState target = bell_state(BellLabel::PhiPlus);
  auto fidelity_at = [&](double p) { return fidelity(apply_channel({kind, p}, Side::A, phi), target); };

  if (fidelity_at(0.0) <= target_fidelity) return 0.0;
  if (fidelity_at(1.0) > target_fidelity) {
    throw ContractViolation(fmt::format("fidelity {} is not reachable with a {} channel",
                                        target_fidelity, to_string(kind)));
  }
  double lo = 0.0;
  double hi = 1.0;
  double mid = 0.5;
  for (int iter = 0; iter < 60; ++iter) {
    mid = 0.5 * (lo + hi);
    const double f = fidelity_at(mid);
    if (std::abs(f - target_fidelity) < 1e-9) break;
    (f > target_fidelity ? lo : hi) = mid;
  }
  return mid;
}

std::vector<double> parse_grid(std::string_view text) {
  std::vector<double> values;
  const auto parts = detail::split(text, ':');
  if (parts.size() == 3) {
    double start = 0.0;
    double stop = 0.0;
    std::size_t steps = 0;
    if (!detail::try_parse(detail::trim(parts[0]), start) ||
        !detail::try_parse(detail::trim(parts[1]), stop) ||
        !detail::try_parse(detail::trim(parts[2]), steps) || steps == 0) {
      throw std::invalid_argument(fmt::format("bad grid '{}'", text));
    }
    if (steps == 1) return {start};
    for (std::size_t i = 0; i < steps; ++i) {
      values.push_back(start + (stop - start) * static_cast<double>(i) /
                                   static_cast<double>(steps - 1));
    }
    return values;
  }
  for (auto item : detail::split(text, ',')) {
    double v = 0.0;
    if (!detail::try_parse(detail::trim(item), v)) {
      throw std::invalid_argument(fmt::format("bad grid '{}'", text));
    }
    values.push_back(v);
  }
  return values;
}

std::string session_csv_header() {
  return "n_pairs,check_fraction,qber1,qber2,aborted_at,bits_sent,bits_decoded,erasures,"
         "bit_errors,bit_rate_per_s,sim_time_s,seed";
}

std::string session_csv_row(const SessionResult& r) {
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}", r.n_pairs, fmt_double(r.check_fraction),
                     fmt_double(r.qber_check1), fmt_double(r.qber_check2), to_string(r.aborted_at),
                     r.bits_sent, r.bits_decoded, r.erasure_positions.size(), r.bit_errors,
                     fmt_double(r.bit_rate_per_s), fmt_double(r.simulated_time_s), r.seed);
}

std::string command_run(const RunConfig& config) {
  const SessionResult result = run_with_seed(config, config.seed);
  return session_csv_header() + "\n" + session_csv_row(result) + "\n";
}

std::string command_sweep(const RunConfig& config, const SweepSpec& sweep) {
  if (sweep.values.empty()) throw ConfigValidationError("sweep needs at least one value");
  if (sweep.trials == 0) throw ConfigValidationError("sweep needs at least one trial");

  std::vector<RunConfig> points;
  for (double value : sweep.values) {
    RunConfig point = config;
    try {
      set_config_value(point, sweep.param, fmt_double(value));
    } catch (const std::invalid_argument& e) {
      throw ConfigValidationError(e.what());
    }
    point.validate();
    points.push_back(std::move(point));
  }

  std::vector<std::future<std::vector<std::string>>> pending;
  for (std::size_t k = 0; k < points.size(); ++k) {
    pending.push_back(std::async(std::launch::async, [&, k] {
      std::vector<std::string> rows;
      for (std::size_t t = 0; t < sweep.trials; ++t) {
        const SessionResult r = run_with_seed(points[k], Rng::derive(config.seed, k, t));
        rows.push_back(fmt::format("{},{},{},{}", sweep.param, fmt_double(sweep.values[k]), t,
                                   session_csv_row(r)));
      }
      return rows;
    }));
  }
  std::string out = "param,value,trial," + session_csv_header() + "\n";
  for (auto& f : pending) {
    for (const auto& row : f.get()) out += row + "\n";
  }
  return out;
}

std::string command_tomo(const RunConfig& config, BellLabel target, std::int64_t shots) {
  if (shots <= 0) throw ConfigValidationError("--shots must be positive");
  const DensityMatrix state = trace_stages(config.session, code_for(target)).back().second;
  Rng rng = Rng(config.seed).child(0, kTomoTag);
  const TomoDataset data = simulate_tomography(state, shots, rng);
  const DensityMatrix reconstructed = project_physical(linear_inversion(data));
  const FidelityReport report =
      fidelity_with_error(data, bell_state(target), config.tomo_resamples, rng);
  std::string out = to_csv(reconstructed.matrix());
  out += "\ntarget,shots,fidelity,sigma,resamples\n";
  out += fmt::format("{},{},{},{},{}\n", to_string(target), shots, fmt_double(report.fidelity),
                     fmt_double(report.sigma), report.resamples);
  return out;
}

std::string command_calibrate(double target_fidelity, ChannelKind kind) {
  const double p = calibrate_noise(target_fidelity, kind);
  return fmt::format("channel,fidelity,p\n{},{},{}\n", to_string(kind),
                     fmt_double(target_fidelity), fmt_double(p));
}

std::string command_attack_demo(const RunConfig& config) {
  RunConfig honest = config;
  honest.session.eve.kind = EveKind::None;
  RunConfig attacked = config;
  attacked.session.eve.kind = EveKind::InterceptResend;
  if (config.session.eve.kind == EveKind::None) {
    attacked.session.eve.basis_policy = BasisPolicy::RandomZX;
  }
  std::string out = "eve," + session_csv_header() + "\n";
  out += "none," + session_csv_row(run_with_seed(honest, config.seed)) + "\n";
  out += "intercept_resend," + session_csv_row(run_with_seed(attacked, config.seed)) + "\n";
  return out;
}

}  // namespace qsdc
