#include "qsdc/errors.hpp"
#include "qsdc/harness.hpp"
#include "qsdc/noise_memory.hpp"
#include "qsdc/protocol.hpp"
#include "qsdc/quantum_core.hpp"
#include "qsdc/tomography.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

namespace py = pybind11;
using namespace qsdc;

namespace {

BellLabel label_arg(const std::string& text) { return parse_bell_label(text); }

Side side_arg(const std::string& text) {
  if (text == "A" || text == "a") return Side::A;
  if (text == "B" || text == "b") return Side::B;
  throw ContractViolation("side must be 'A' or 'B'");
}

ChannelKind channel_arg(const std::string& text) {
  if (text == "depol") return ChannelKind::Depolarizing;
  if (text == "dephase") return ChannelKind::Dephasing;
  if (text == "none") return ChannelKind::None;
  throw ContractViolation("channel must be 'depol', 'dephase' or 'none'");
}

py::dict session_dict(const SessionResult& r) {
  py::dict d;
  d["seed"] = r.seed;
  d["n_pairs"] = r.n_pairs;
  d["check_fraction"] = r.check_fraction;
  d["decoded_bits"] = format_bits(r.decoded_bits);
  d["erasure_positions"] = r.erasure_positions;
  d["qber_check1"] = r.qber_check1;
  d["qber_check2"] = r.qber_check2;
  d["check1_records"] = r.check1_records;
  d["check2_records"] = r.check2_records;
  d["aborted_at"] = std::string(to_string(r.aborted_at));
  d["pairs_lost"] = r.pairs_lost;
  d["bits_sent"] = r.bits_sent;
  d["bits_decoded"] = r.bits_decoded;
  d["bit_errors"] = r.bit_errors;
  d["group_errors"] = r.group_errors;
  d["bit_error_rate"] = r.bit_error_rate;
  d["simulated_time_s"] = r.simulated_time_s;
  d["bit_rate_per_s"] = r.bit_rate_per_s;
  return d;
}

}  // namespace

PYBIND11_MODULE(_qsdc, m) {
  m.doc() = "Entanglement-based QSDC simulator";

  py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_ValueError);
  py::register_exception<CapacityError>(m, "CapacityError", PyExc_RuntimeError);
  py::register_exception<TimingError>(m, "TimingError", PyExc_RuntimeError);
  py::register_exception<ConfigParseError>(m, "ConfigParseError", PyExc_ValueError);
  py::register_exception<ConfigValidationError>(m, "ConfigValidationError", PyExc_ValueError);

  m.def("bell_state", [](const std::string& label) { return bell_state(label_arg(label)).amplitudes(); },
        py::arg("label"), "Amplitudes of phi+, phi-, psi+ or psi- in the HH, HV, VH, VV basis.");
  m.def("bell_density",
        [](const std::string& label) { return bell_state(label_arg(label)).projector(); },
        py::arg("label"));
  m.def("encode_unitary",
        [](unsigned code) { return encode_unitary(TwoBitCode::from_value(code)).matrix(); },
        py::arg("code"), "Pauli operation for a two-bit code given as 0..3.");
  m.def("hwp_unitary", [](double theta) { return hwp_unitary(theta).matrix(); }, py::arg("theta"));
  m.def(
      "apply_local",
      [](const Mat2& u, const std::string& side, const Mat4& rho) {
        return apply_local(Unitary2(u), side_arg(side), DensityMatrix(rho)).matrix();
      },
      py::arg("u"), py::arg("side"), py::arg("rho"));
  m.def(
      "apply_channel",
      [](const std::string& kind, double p, const std::string& side, const Mat4& rho) {
        return apply_channel({channel_arg(kind), p}, side_arg(side), DensityMatrix(rho)).matrix();
      },
      py::arg("kind"), py::arg("p"), py::arg("side"), py::arg("rho"));
  m.def(
      "fidelity",
      [](const Mat4& rho, const std::string& target) {
        return fidelity(DensityMatrix(rho), bell_state(label_arg(target)));
      },
      py::arg("rho"), py::arg("target"));
  m.def(
      "validate_physical",
      [](const Mat4& rho) {
        const PhysicalityReport r = validate_physical(rho);
        py::dict d;
        d["hermiticity_deviation"] = r.hermiticity_deviation;
        d["trace_deviation"] = r.trace_deviation;
        d["min_eigenvalue"] = r.min_eigenvalue;
        d["physical"] = r.physical;
        return d;
      },
      py::arg("rho"));
  m.def(
      "calibrate_noise",
      [](double fidelity, const std::string& kind) { return calibrate_noise(fidelity, channel_arg(kind)); },
      py::arg("fidelity"), py::arg("kind") = "depol");

  m.def(
      "reconstruct_exact",
      [](const Mat4& rho) { return linear_inversion(exact_moments(DensityMatrix(rho))); },
      py::arg("rho"), "Linear inversion from the state's exact outcome probabilities.");
  m.def("project_physical", [](const Mat4& estimate) { return project_physical(estimate).matrix(); },
        py::arg("estimate"));
  m.def(
      "tomography",
      [](const Mat4& rho, std::int64_t shots, const std::string& target, std::uint64_t seed,
         std::size_t resamples) {
        Rng rng(seed);
        const TomoDataset data = simulate_tomography(DensityMatrix(rho), shots, rng);
        const FidelityReport r = fidelity_with_error(data, bell_state(label_arg(target)), resamples, rng);
        py::dict d;
        d["estimate"] = project_physical(linear_inversion(data)).matrix();
        d["fidelity"] = r.fidelity;
        d["sigma"] = r.sigma;
        d["resamples"] = r.resamples;
        return d;
      },
      py::arg("rho"), py::arg("shots"), py::arg("target") = "phi+", py::arg("seed") = 1,
      py::arg("resamples") = kDefaultResamples);

  m.def(
      "run_session",
      [](const std::string& config_text) {
        const RunConfig config = parse_run_config(config_text);
        return session_dict(run_session(config.session, session_message(config), Rng(config.seed)));
      },
      py::arg("config_text"), "Run one session from `key = value` configuration text.");
  m.def(
      "run_csv", [](const std::string& config_text) { return command_run(parse_run_config(config_text)); },
      py::arg("config_text"));
  m.def("config_keys", [] {
    std::vector<std::string> keys;
    for (auto k : config_keys()) keys.emplace_back(k);
    return keys;
  });
  m.def(
      "intercept_resend_qber",
      [](const std::string& policy, const std::string& check_basis) {
        BasisPolicy p;
        if (policy == "always_z") p = BasisPolicy::AlwaysZ;
        else if (policy == "always_x") p = BasisPolicy::AlwaysX;
        else if (policy == "random_zx") p = BasisPolicy::RandomZX;
        else throw ContractViolation("policy must be always_z, always_x or random_zx");
        return intercept_resend_qber(p, parse_local_basis(check_basis));
      },
      py::arg("policy"), py::arg("check_basis"));
}
