#pragma once

// Run-configuration files, noise calibration and the CSV-emitting commands
// behind the `qsdc` tool.

#include "qsdc/noise_memory.hpp"
#include "qsdc/protocol.hpp"
#include "qsdc/quantum_core.hpp"
#include "qsdc/tomography.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qsdc {

enum class ExitCode : int {
  Ok = 0,
  Usage = 1,
  ParseError = 2,
  ValidationError = 3,
  CapacityError = 4,
  TimingError = 5,
};

class ConfigParseError : public std::runtime_error {
 public:
  ConfigParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ConfigValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  SessionConfig session;
  std::uint64_t seed = 1;
  // Explicit message; when empty, `message_length` random bits are drawn
  // from the seed instead.
  std::vector<bool> message;
  std::size_t message_length = 0;
  std::size_t tomo_resamples = kDefaultResamples;

  void validate() const;  // throws ConfigValidationError
};

// `key = value` lines, `#` starts a comment. Unknown keys and malformed lines
// raise ConfigParseError carrying the 1-based line number; the parsed
// configuration is then validated (ConfigValidationError).
RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::filesystem::path& path);

// Assigns one key; throws std::invalid_argument on an unknown key or value.
void set_config_value(RunConfig& config, std::string_view key, std::string_view value);

// Names accepted by set_config_value.
const std::vector<std::string_view>& config_keys();

std::vector<bool> session_message(const RunConfig& config);

// Channel probability p whose one-sided application to phi+ gives
// `target_fidelity` within 1e-6, by bisection on the channel itself.
// Throws ContractViolation outside (0.25, 1] or for ChannelKind::None.
double calibrate_noise(double target_fidelity, ChannelKind kind);

struct SweepSpec {
  std::string param;
  std::vector<double> values;
  std::size_t trials = 1;
};

// "START:STOP:STEPS" inclusive linear grid, or a comma-separated list.
std::vector<double> parse_grid(std::string_view text);

std::string session_csv_header();
std::string session_csv_row(const SessionResult& result);

// Each command returns the complete standard-output text.
std::string command_run(const RunConfig& config);
// Rows in (point, trial) order; trial t of point k uses seed
// Rng::derive(seed, k, t). Points are evaluated concurrently.
std::string command_sweep(const RunConfig& config, const SweepSpec& sweep);
// Matrix CSV, a blank line, then `target,shots,fidelity,sigma,resamples`.
std::string command_tomo(const RunConfig& config, BellLabel target, std::int64_t shots);
std::string command_calibrate(double target_fidelity, ChannelKind kind);
// Two rows with an extra leading `eve` column: no eavesdropper, then
// intercept-resend (the configured policy, or random_zx).
std::string command_attack_demo(const RunConfig& config);

}  // namespace qsdc
