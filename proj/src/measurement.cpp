#include "qsdc/measurement.hpp"

#include "qsdc/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace qsdc {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

}  // namespace

std::string_view to_string(LocalBasis basis) {
  switch (basis) {
    case LocalBasis::Z: return "Z";
    case LocalBasis::X: return "X";
    case LocalBasis::Y: return "Y";
  }
  return "?";
}

LocalBasis parse_local_basis(std::string_view text) {
  for (auto b : kLocalBases) {
    if (text == to_string(b)) return b;
  }
  throw ContractViolation(fmt::format("unknown local basis '{}'", text));
}

Eigen::Vector2cd basis_vector(LocalBasis basis, int outcome) {
  const double sign = outcome == 0 ? 1.0 : -1.0;
  Eigen::Vector2cd v;
  switch (basis) {
    case LocalBasis::Z:
      v = outcome == 0 ? Eigen::Vector2cd(1, 0) : Eigen::Vector2cd(0, 1);
      break;
    case LocalBasis::X:
      v << kInvSqrt2, sign * kInvSqrt2;
      break;
    case LocalBasis::Y:
      v << kInvSqrt2, Complex(0.0, sign * kInvSqrt2);
      break;
  }
  return v;
}

std::string_view to_string(BsmOutcome outcome) {
  switch (outcome) {
    case BsmOutcome::PhiPlus: return "phi+";
    case BsmOutcome::PhiMinus: return "phi-";
    case BsmOutcome::PsiPlus: return "psi+";
    case BsmOutcome::PsiMinus: return "psi-";
    case BsmOutcome::Erasure: return "erasure";
  }
  return "?";
}

BsmOutcome to_outcome(BellLabel label) { return static_cast<BsmOutcome>(label); }

Probs4 outcome_probs(const DensityMatrix& state, LocalBasis basis_a, LocalBasis basis_b) {
  Probs4 probs{};
  double total = 0.0;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const Eigen::Vector2cd va = basis_vector(basis_a, a);
      const Eigen::Vector2cd vb = basis_vector(basis_b, b);
      Vec4 ket;
      ket << va(0) * vb(0), va(0) * vb(1), va(1) * vb(0), va(1) * vb(1);
      const double p = (ket.adjoint() * state.matrix() * ket)(0, 0).real();
      probs[2 * a + b] = std::max(p, 0.0);
      total += probs[2 * a + b];
    }
  }
  for (auto& p : probs) p /= total;
  return probs;
}

Counts4 sample_counts(const Probs4& probs, std::int64_t shots, Rng& rng) {
  if (shots < 0) throw ContractViolation("shot count must be non-negative");
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw ContractViolation("probabilities must be non-negative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ContractViolation(fmt::format("probabilities sum to {:.17g}, expected 1", sum));
  }
  Counts4 counts{};
  auto remaining = static_cast<std::uint64_t>(shots);
  double mass_left = sum;
  for (int i = 0; i < 3; ++i) {
    if (remaining == 0) break;
    const double conditional = mass_left > 0.0 ? std::min(probs[i] / mass_left, 1.0) : 0.0;
    counts[i] = rng.binomial(remaining, conditional);
    remaining -= counts[i];
    mass_left -= probs[i];
  }
  counts[3] = remaining;
  return counts;
}

int sample_index(const Probs4& probs, Rng& rng) {
  double total = 0.0;
  for (double p : probs) total += p;
  const double u = rng.uniform() * total;
  double acc = 0.0;
  int last = 0;
  for (int i = 0; i < 4; ++i) {
    if (probs[i] <= 0.0) continue;
    last = i;
    acc += probs[i];
    if (u < acc) return i;
  }
  return last;
}

BsmOutcome bsm(const DensityMatrix& state, BsmMode mode, Rng& rng) {
  Probs4 overlaps{};
  for (auto label : kBellLabels) {
    overlaps[static_cast<int>(label)] = fidelity(state, bell_state(label));
  }
  const auto label = static_cast<BellLabel>(sample_index(overlaps, rng));
  if (mode == BsmMode::LinearOptics &&
      (label == BellLabel::PhiPlus || label == BellLabel::PhiMinus)) {
    return BsmOutcome::Erasure;
  }
  return to_outcome(label);
}

LocalMeasurement measure_and_resend(const DensityMatrix& state, Side side, LocalBasis basis,
                                    Rng& rng) {
  std::array<Mat4, 2> branches;
  Probs4 probs{};
  for (int k = 0; k < 2; ++k) {
    const Eigen::Vector2cd v = basis_vector(basis, k);
    const Mat4 projector = lift(v * v.adjoint(), side);
    branches[k] = projector * state.matrix() * projector;
    probs[k] = std::max(branches[k].trace().real(), 0.0);
  }
  const int outcome = sample_index(probs, rng);
  // The projected branch is already (rest) x |k><k|; normalizing it is the resend.
  return {outcome, trusted_density(branches[outcome] / probs[outcome])};
}

}  // namespace qsdc
