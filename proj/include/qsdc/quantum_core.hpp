#pragma once

// Two-qubit polarization algebra.
//
// Basis ordering is (|HH>, |HV>, |VH>, |VV>); the first factor is Alice's
// qubit (side A), the second Bob's (side B). Everything here is a pure
// function of its inputs.

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

namespace qsdc {

using Complex = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using Vec4 = Eigen::Vector4cd;

namespace tol {
inline constexpr double kExact = 1e-12;
inline constexpr double kChannel = 1e-10;
inline constexpr double kEigen = 1e-9;
}  // namespace tol

enum class Side { A, B };

enum class BellLabel : std::uint8_t { PhiPlus = 0, PhiMinus = 1, PsiPlus = 2, PsiMinus = 3 };

inline constexpr std::array<BellLabel, 4> kBellLabels = {
    BellLabel::PhiPlus, BellLabel::PhiMinus, BellLabel::PsiPlus, BellLabel::PsiMinus};

std::string_view to_string(BellLabel label);
// Accepts "phi+", "phi-", "psi+", "psi-".
BellLabel parse_bell_label(std::string_view text);

// Two classical bits carried by one dense-coded pair. The high bit is the
// first bit of the pair in message order.
class TwoBitCode {
 public:
  constexpr TwoBitCode() = default;
  constexpr TwoBitCode(bool first, bool second)
      : value_(static_cast<std::uint8_t>((first ? 2 : 0) | (second ? 1 : 0))) {}

  static TwoBitCode from_value(unsigned value);

  constexpr std::uint8_t value() const { return value_; }
  constexpr bool first() const { return (value_ & 2) != 0; }
  constexpr bool second() const { return (value_ & 1) != 0; }

  friend constexpr bool operator==(TwoBitCode, TwoBitCode) = default;

 private:
  std::uint8_t value_ = 0;
};

std::string to_string(TwoBitCode code);

// Agreed encoding table: 00 -> phi+, 01 -> phi-, 10 -> psi+, 11 -> psi-.
BellLabel label_for(TwoBitCode code);
TwoBitCode code_for(BellLabel label);

class PureState {
 public:
  // Throws ContractViolation unless the amplitudes have unit norm within 1e-12.
  explicit PureState(const Vec4& amplitudes);

  const Vec4& amplitudes() const { return amplitudes_; }
  Mat4 projector() const { return amplitudes_ * amplitudes_.adjoint(); }

 private:
  Vec4 amplitudes_;
};

class Unitary2 {
 public:
  // Throws ContractViolation unless U U^dagger = I within 1e-12.
  explicit Unitary2(const Mat2& entries);

  const Mat2& matrix() const { return entries_; }

  friend Unitary2 operator*(const Unitary2& lhs, const Unitary2& rhs) {
    return Unitary2(lhs.entries_ * rhs.entries_);
  }

 private:
  Mat2 entries_;
};

struct PhysicalityReport {
  double hermiticity_deviation = 0.0;  // max |rho_ij - conj(rho_ji)|
  double trace_deviation = 0.0;        // |tr(rho) - 1|
  double min_eigenvalue = 0.0;
  bool physical = false;
};

PhysicalityReport validate_physical(const Mat4& entries);

// Hermitian, unit-trace, positive-semidefinite 4x4 matrix.
class DensityMatrix {
 public:
  // Throws ContractViolation with the failing report fields if the matrix is
  // not physical within the module tolerances.
  explicit DensityMatrix(const Mat4& entries);

  static DensityMatrix from_pure(const PureState& state);
  static DensityMatrix maximally_mixed();

  const Mat4& matrix() const { return entries_; }
  Complex operator()(int row, int col) const { return entries_(row, col); }

  // Reduced 2x2 state of one side.
  Mat2 reduced(Side keep) const;

 private:
  struct Trusted {};
  DensityMatrix(const Mat4& entries, Trusted) : entries_(entries) {}

  friend DensityMatrix trusted_density(const Mat4& entries);

  Mat4 entries_;
};

// Wraps the output of a physicality-preserving map without re-validating it;
// the entries are symmetrized to remove rounding asymmetry.
DensityMatrix trusted_density(const Mat4& entries);

namespace pauli {
Mat2 identity();
Mat2 x();
Mat2 y();
Mat2 z();
// i * sigma_y = [[0, 1], [-1, 0]].
Mat2 iy();
}  // namespace pauli

Mat4 kron(const Mat2& a, const Mat2& b);
Mat4 lift(const Mat2& op, Side side);

PureState bell_state(BellLabel label);

// 00 -> I, 01 -> sigma_z, 10 -> sigma_x, 11 -> i sigma_y.
Unitary2 encode_unitary(TwoBitCode code);

// Half-wave plate with its fast axis at `theta` radians from the vertical:
// [[-cos 2t, sin 2t], [sin 2t, cos 2t]] in the (H, V) basis.
Unitary2 hwp_unitary(double theta);

DensityMatrix apply_local(const Unitary2& u, Side side, const DensityMatrix& state);

// <target| rho |target>, clamped to [0, 1].
double fidelity(const DensityMatrix& state, const PureState& target);

// Maximum elementwise distance between two matrices.
double max_abs_diff(const Mat4& a, const Mat4& b);

// CSV with header `row,col,re,im`, 16 row-major data lines, 17 significant
// digits, no locale dependence.
std::string to_csv(const Mat4& entries);
// Inverse of to_csv. Throws std::runtime_error on malformed input.
Mat4 matrix_from_csv(std::string_view csv);

}  // namespace qsdc
