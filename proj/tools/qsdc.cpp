#include "qsdc/errors.hpp"
#include "qsdc/harness.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <string>

namespace {

using qsdc::ExitCode;

int code(ExitCode c) { return static_cast<int>(c); }

// QSDC_SEED, when set, replaces the seed from the configuration file.
qsdc::RunConfig load(const std::string& path) {
  qsdc::RunConfig config = qsdc::load_run_config(path);
  if (const char* env = std::getenv("QSDC_SEED"); env != nullptr && *env != '\0') {
    try {
      qsdc::set_config_value(config, "seed", env);
    } catch (const std::invalid_argument& e) {
      throw qsdc::ConfigParseError(0, std::string("QSDC_SEED: ") + e.what());
    }
  }
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum secure direct communication simulator"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run one session and print its result row");
  run->add_option("-c,--config", config_path, "Run configuration file")->required();

  std::string param;
  std::string grid;
  std::size_t trials = 1;
  auto* sweep = app.add_subcommand("sweep", "Sweep one configuration key over a grid");
  sweep->add_option("-c,--config", config_path)->required();
  sweep->add_option("--param", param, "Configuration key to vary")->required();
  sweep->add_option("--grid", grid, "START:STOP:STEPS or a comma-separated list")->required();
  sweep->add_option("--trials", trials, "Sessions per grid point")->check(CLI::PositiveNumber);

  std::string target = "phi+";
  std::int64_t shots = 10000;
  auto* tomo = app.add_subcommand("tomo", "Tomography of a target state after the configured noise");
  tomo->add_option("-c,--config", config_path)->required();
  tomo->add_option("--target", target)->check(CLI::IsMember({"phi+", "phi-", "psi+", "psi-"}));
  tomo->add_option("--shots", shots, "Shots per basis pair");

  double fidelity = 1.0;
  std::string channel = "depol";
  auto* calibrate = app.add_subcommand("calibrate", "Channel strength for a target Bell fidelity");
  calibrate->add_option("--fidelity", fidelity)->required();
  calibrate->add_option("--channel", channel)->check(CLI::IsMember({"depol", "dephase"}));

  auto* attack = app.add_subcommand("attack-demo", "Paired sessions without and with intercept-resend");
  attack->add_option("-c,--config", config_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int status = app.exit(e);
    return status == 0 ? 0 : code(ExitCode::Usage);
  }

  try {
    std::string out;
    if (*run) {
      out = qsdc::command_run(load(config_path));
    } else if (*sweep) {
      qsdc::SweepSpec spec;
      spec.param = param;
      spec.trials = trials;
      try {
        spec.values = qsdc::parse_grid(grid);
      } catch (const std::invalid_argument& e) {
        throw qsdc::ConfigValidationError(e.what());
      }
      out = qsdc::command_sweep(load(config_path), spec);
    } else if (*tomo) {
      out = qsdc::command_tomo(load(config_path), qsdc::parse_bell_label(target), shots);
    } else if (*calibrate) {
      out = qsdc::command_calibrate(fidelity, channel == "depol" ? qsdc::ChannelKind::Depolarizing
                                                                 : qsdc::ChannelKind::Dephasing);
    } else if (*attack) {
      out = qsdc::command_attack_demo(load(config_path));
    }
    std::cout << out;
    return code(ExitCode::Ok);
  } catch (const qsdc::ConfigParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return code(ExitCode::ParseError);
  } catch (const qsdc::ConfigValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return code(ExitCode::ValidationError);
  } catch (const qsdc::ContractViolation& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return code(ExitCode::ValidationError);
  } catch (const qsdc::CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return code(ExitCode::CapacityError);
  } catch (const qsdc::TimingError& e) {
    std::cerr << "timing error: " << e.what() << "\n";
    return code(ExitCode::TimingError);
  }
}
