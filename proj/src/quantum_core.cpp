#include "qsdc/quantum_core.hpp"

#include "qsdc/errors.hpp"
#include "text_util.hpp"

#include <fmt/format.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace qsdc {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

int side_offset(Side side) { return side == Side::A ? 0 : 1; }

}  // namespace

std::string_view to_string(BellLabel label) {
  switch (label) {
    case BellLabel::PhiPlus: return "phi+";
    case BellLabel::PhiMinus: return "phi-";
    case BellLabel::PsiPlus: return "psi+";
    case BellLabel::PsiMinus: return "psi-";
  }
  return "?";
}

BellLabel parse_bell_label(std::string_view text) {
  for (auto label : kBellLabels) {
    if (text == to_string(label)) return label;
  }
  throw ContractViolation(fmt::format("unknown Bell label '{}'", text));
}

TwoBitCode TwoBitCode::from_value(unsigned value) {
  if (value > 3) throw ContractViolation("two-bit code must be in 0..3");
  return TwoBitCode((value & 2) != 0, (value & 1) != 0);
}

std::string to_string(TwoBitCode code) {
  return {code.first() ? '1' : '0', code.second() ? '1' : '0'};
}

BellLabel label_for(TwoBitCode code) { return static_cast<BellLabel>(code.value()); }

TwoBitCode code_for(BellLabel label) {
  return TwoBitCode::from_value(static_cast<unsigned>(label));
}

PureState::PureState(const Vec4& amplitudes) : amplitudes_(amplitudes) {
  const double norm = amplitudes.squaredNorm();
  if (std::abs(norm - 1.0) > tol::kExact) {
    throw ContractViolation(fmt::format("pure state norm^2 is {:.17g}, expected 1", norm));
  }
}

Unitary2::Unitary2(const Mat2& entries) : entries_(entries) {
  const double dev = (entries * entries.adjoint() - Mat2::Identity()).cwiseAbs().maxCoeff();
  if (!(dev <= tol::kExact)) {
    throw ContractViolation(fmt::format("matrix is not unitary (deviation {:.3g})", dev));
  }
}

PhysicalityReport validate_physical(const Mat4& entries) {
  PhysicalityReport report;
  report.hermiticity_deviation = (entries - entries.adjoint()).cwiseAbs().maxCoeff();
  report.trace_deviation = std::abs(entries.trace() - Complex(1.0, 0.0));
  const Mat4 hermitian = 0.5 * (entries + entries.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat4> solver(hermitian, Eigen::EigenvaluesOnly);
  report.min_eigenvalue = solver.eigenvalues().minCoeff();
  report.physical = report.hermiticity_deviation <= tol::kChannel &&
                    report.trace_deviation <= tol::kChannel &&
                    report.min_eigenvalue >= -tol::kEigen;
  return report;
}

DensityMatrix::DensityMatrix(const Mat4& entries) : entries_(entries) {
  const auto report = validate_physical(entries);
  if (!report.physical) {
    throw ContractViolation(fmt::format(
        "matrix is not a density matrix (hermiticity {:.3g}, trace {:.3g}, min eigenvalue {:.3g})",
        report.hermiticity_deviation, report.trace_deviation, report.min_eigenvalue));
  }
}

DensityMatrix DensityMatrix::from_pure(const PureState& state) {
  return trusted_density(state.projector());
}

DensityMatrix DensityMatrix::maximally_mixed() {
  return DensityMatrix(Mat4::Identity() * 0.25, Trusted{});
}

Mat2 DensityMatrix::reduced(Side keep) const {
  Mat2 out = Mat2::Zero();
  // index = 2 * a + b
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      for (int k = 0; k < 2; ++k) {
        out(i, j) += keep == Side::A ? entries_(2 * i + k, 2 * j + k)
                                     : entries_(2 * k + i, 2 * k + j);
      }
    }
  }
  return out;
}

DensityMatrix trusted_density(const Mat4& entries) {
  return DensityMatrix(0.5 * (entries + entries.adjoint()), DensityMatrix::Trusted{});
}

namespace pauli {
Mat2 identity() { return Mat2::Identity(); }
Mat2 x() {
  Mat2 m;
  m << 0, 1, 1, 0;
  return m;
}
Mat2 y() {
  Mat2 m;
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}
Mat2 z() {
  Mat2 m;
  m << 1, 0, 0, -1;
  return m;
}
Mat2 iy() {
  Mat2 m;
  m << 0, 1, -1, 0;
  return m;
}
}  // namespace pauli

Mat4 kron(const Mat2& a, const Mat2& b) {
  Mat4 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) out(2 * i + k, 2 * j + l) = a(i, j) * b(k, l);
  return out;
}

Mat4 lift(const Mat2& op, Side side) {
  return side_offset(side) == 0 ? kron(op, Mat2::Identity()) : kron(Mat2::Identity(), op);
}

PureState bell_state(BellLabel label) {
  Vec4 v = Vec4::Zero();
  switch (label) {
    case BellLabel::PhiPlus: v << kInvSqrt2, 0, 0, kInvSqrt2; break;
    case BellLabel::PhiMinus: v << kInvSqrt2, 0, 0, -kInvSqrt2; break;
    case BellLabel::PsiPlus: v << 0, kInvSqrt2, kInvSqrt2, 0; break;
    case BellLabel::PsiMinus: v << 0, kInvSqrt2, -kInvSqrt2, 0; break;
  }
  return PureState(v);
}

Unitary2 encode_unitary(TwoBitCode code) {
  switch (code.value()) {
    case 0: return Unitary2(pauli::identity());
    case 1: return Unitary2(pauli::z());
    case 2: return Unitary2(pauli::x());
    default: return Unitary2(pauli::iy());
  }
}

Unitary2 hwp_unitary(double theta) {
  if (!std::isfinite(theta)) throw ContractViolation("wave-plate angle must be finite");
  const double c = std::cos(2.0 * theta);
  const double s = std::sin(2.0 * theta);
  Mat2 m;
  m << -c, s, s, c;
  return Unitary2(m);
}

DensityMatrix apply_local(const Unitary2& u, Side side, const DensityMatrix& state) {
  const Mat4 full = lift(u.matrix(), side);
  return trusted_density(full * state.matrix() * full.adjoint());
}

double fidelity(const DensityMatrix& state, const PureState& target) {
  const Vec4& psi = target.amplitudes();
  const double overlap = (psi.adjoint() * state.matrix() * psi)(0, 0).real();
  return std::clamp(overlap, 0.0, 1.0);
}

double max_abs_diff(const Mat4& a, const Mat4& b) { return (a - b).cwiseAbs().maxCoeff(); }

std::string to_csv(const Mat4& entries) {
  std::string out = "row,col,re,im\n";
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      const Complex z = entries(r, c);
      // fmt formatting is locale-independent unless 'L' is requested.
      out += fmt::format("{},{},{:.17g},{:.17g}\n", r, c, z.real(), z.imag());
    }
  }
  return out;
}

Mat4 matrix_from_csv(std::string_view csv) {
  const auto lines = detail::lines_of(csv);
  if (lines.size() != 17 || lines[0] != "row,col,re,im") {
    throw std::runtime_error("matrix csv: expected header and 16 data lines");
  }
  Mat4 out = Mat4::Zero();
  std::array<bool, 16> seen{};
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = detail::split(lines[i], ',');
    if (fields.size() != 4) throw std::runtime_error("matrix csv: expected 4 fields");
    const int r = detail::parse_or_throw<int>(fields[0], "matrix csv");
    const int c = detail::parse_or_throw<int>(fields[1], "matrix csv");
    if (r < 0 || r > 3 || c < 0 || c > 3 || seen[4 * r + c]) {
      throw std::runtime_error("matrix csv: bad or repeated index");
    }
    seen[4 * r + c] = true;
    out(r, c) = Complex(detail::parse_or_throw<double>(fields[2], "matrix csv"),
                        detail::parse_or_throw<double>(fields[3], "matrix csv"));
  }
  return out;
}

}  // namespace qsdc
