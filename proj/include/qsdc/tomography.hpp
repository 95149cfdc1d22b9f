#pragma once

#include "qsdc/measurement.hpp"
#include "qsdc/quantum_core.hpp"
#include "qsdc/rng.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace qsdc {

// Indexed [basis A][basis B] in LocalBasis order (Z, X, Y).
template <typename T>
using BasisTable = std::array<std::array<T, 3>, 3>;

// Coincidence counts for all nine local-basis pairs.
struct TomoDataset {
  std::uint64_t shots_per_basis = 0;
  BasisTable<Counts4> counts{};

  const Counts4& at(LocalBasis a, LocalBasis b) const {
    return counts[static_cast<int>(a)][static_cast<int>(b)];
  }

  // Throws ContractViolation unless every cell sums to shots_per_basis > 0.
  void validate() const;
};

// Infinite-shot data: the exact outcome probabilities for every basis pair.
struct ExactMoments {
  BasisTable<Probs4> probs{};
};

struct FidelityReport {
  double fidelity = 0.0;
  double sigma = 0.0;
  std::size_t resamples = 0;
};

inline constexpr std::size_t kMinResamples = 50;
inline constexpr std::size_t kDefaultResamples = 100;

ExactMoments exact_moments(const DensityMatrix& state);

TomoDataset simulate_tomography(const DensityMatrix& state, std::int64_t shots_per_basis,
                                Rng& rng);

// rho = 1/4 sum_ij s_ij sigma_i x sigma_j with s_II = 1. Single-sided Stokes
// parameters are averaged over the three settings of the other side. The
// result is Hermitian with unit trace but may have negative eigenvalues.
Mat4 linear_inversion(const TomoDataset& data);
Mat4 linear_inversion(const ExactMoments& moments);

// Euclidean projection of a vector onto the probability simplex.
Eigen::Vector4d project_to_simplex(const Eigen::Vector4d& values);

// Closest density matrix in Frobenius norm: eigen-decompose, project the
// spectrum onto the simplex, reassemble.
DensityMatrix project_physical(const Mat4& estimate);

// Point estimate from the reconstructed state; sigma is the sample standard
// deviation of the same statistic over parametric-bootstrap datasets drawn
// from the empirical cell frequencies. Resample r uses the stream
// derive(base, r, tag) where base is one draw from `rng`, so the aggregate
// does not depend on evaluation order.
FidelityReport fidelity_with_error(const TomoDataset& data, const PureState& target,
                                   std::size_t resamples, Rng& rng);
FidelityReport fidelity_with_error(const ExactMoments& moments, const PureState& target,
                                   std::size_t resamples = kDefaultResamples);

// CSV with header `basisA,basisB,outcome,count`; outcome is one of ++, +-, -+, --.
std::string to_csv(const TomoDataset& data);
TomoDataset dataset_from_csv(std::string_view csv);

}  // namespace qsdc
