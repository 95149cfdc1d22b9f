#pragma once

#include "qsdc/quantum_core.hpp"
#include "qsdc/rng.hpp"

#include <array>
#include <cstdint>
#include <string_view>

namespace qsdc {

// Z: H (+) / V (-). X: D = (H + V)/sqrt2 (+) / A (-). Y: R = (H + iV)/sqrt2 (+) / L (-).
enum class LocalBasis : std::uint8_t { Z = 0, X = 1, Y = 2 };

inline constexpr std::array<LocalBasis, 3> kLocalBases = {LocalBasis::Z, LocalBasis::X,
                                                          LocalBasis::Y};

std::string_view to_string(LocalBasis basis);
LocalBasis parse_local_basis(std::string_view text);

// Eigenvector of the basis for outcome 0 (+) or 1 (-).
Eigen::Vector2cd basis_vector(LocalBasis basis, int outcome);

enum class BsmOutcome : std::uint8_t { PhiPlus = 0, PhiMinus = 1, PsiPlus = 2, PsiMinus = 3, Erasure = 4 };

std::string_view to_string(BsmOutcome outcome);
BsmOutcome to_outcome(BellLabel label);

enum class BsmMode { Ideal, LinearOptics };

using Probs4 = std::array<double, 4>;
using Counts4 = std::array<std::uint64_t, 4>;

// Joint outcome probabilities ordered (++, +-, -+, --).
Probs4 outcome_probs(const DensityMatrix& state, LocalBasis basis_a, LocalBasis basis_b);

// Multinomial draw by sequential conditional binomials.
Counts4 sample_counts(const Probs4& probs, std::int64_t shots, Rng& rng);

// Index drawn from a discrete distribution (probabilities need not be
// exactly normalized; the last nonzero entry absorbs rounding).
int sample_index(const Probs4& probs, Rng& rng);

// Ideal: label L with probability <Bell_L|rho|Bell_L>. LinearOptics: the same
// draw, with phi+ and phi- reported as Erasure.
BsmOutcome bsm(const DensityMatrix& state, BsmMode mode, Rng& rng);

struct LocalMeasurement {
  int outcome;  // 0 for +, 1 for -
  DensityMatrix post_state;
};

// Projective measurement of one side followed by re-preparation of the
// observed eigenstate (intercept-resend).
LocalMeasurement measure_and_resend(const DensityMatrix& state, Side side, LocalBasis basis,
                                    Rng& rng);

}  // namespace qsdc
