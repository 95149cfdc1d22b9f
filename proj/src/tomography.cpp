#include "qsdc/tomography.hpp"

#include "qsdc/errors.hpp"
#include "text_util.hpp"

#include <fmt/format.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

namespace qsdc {
namespace {

constexpr std::uint64_t kBootstrapTag = 0xb007;
constexpr std::array<std::string_view, 4> kOutcomeNames = {"++", "+-", "-+", "--"};

// Pauli operator measured by each local basis.
Mat2 observable(int basis_index) {
  switch (static_cast<LocalBasis>(basis_index)) {
    case LocalBasis::Z: return pauli::z();
    case LocalBasis::X: return pauli::x();
    case LocalBasis::Y: return pauli::y();
  }
  return pauli::identity();
}

Mat4 reconstruct(const BasisTable<Probs4>& freq) {
  // stokes_a[i] is <sigma_i x I>, stokes_b[j] is <I x sigma_j>.
  std::array<double, 3> stokes_a{};
  std::array<double, 3> stokes_b{};
  Mat4 rho = kron(pauli::identity(), pauli::identity());
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      const Probs4& p = freq[a][b];
      const double corr = p[0] - p[1] - p[2] + p[3];
      stokes_a[a] += (p[0] + p[1] - p[2] - p[3]) / 3.0;
      stokes_b[b] += (p[0] - p[1] + p[2] - p[3]) / 3.0;
      rho += corr * kron(observable(a), observable(b));
    }
  }
  for (int i = 0; i < 3; ++i) {
    rho += stokes_a[i] * kron(observable(i), pauli::identity());
    rho += stokes_b[i] * kron(pauli::identity(), observable(i));
  }
  rho *= 0.25;
  return 0.5 * (rho + rho.adjoint());
}

BasisTable<Probs4> frequencies(const TomoDataset& data) {
  BasisTable<Probs4> freq{};
  const auto shots = static_cast<double>(data.shots_per_basis);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int k = 0; k < 4; ++k) freq[a][b][k] = static_cast<double>(data.counts[a][b][k]) / shots;
  return freq;
}

double sample_stddev(const std::vector<double>& values) {
  if (values.size() < 2) return 0.0;
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

}  // namespace

void TomoDataset::validate() const {
  if (shots_per_basis == 0) throw ContractViolation("tomography dataset has zero shots");
  for (const auto& row : counts) {
    for (const auto& cell : row) {
      if (std::accumulate(cell.begin(), cell.end(), std::uint64_t{0}) != shots_per_basis) {
        throw ContractViolation("tomography cell counts do not sum to shots_per_basis");
      }
    }
  }
}

ExactMoments exact_moments(const DensityMatrix& state) {
  ExactMoments out;
  for (auto a : kLocalBases)
    for (auto b : kLocalBases)
      out.probs[static_cast<int>(a)][static_cast<int>(b)] = outcome_probs(state, a, b);
  return out;
}

TomoDataset simulate_tomography(const DensityMatrix& state, std::int64_t shots_per_basis,
                                Rng& rng) {
  if (shots_per_basis <= 0) throw ContractViolation("shots_per_basis must be positive");
  TomoDataset data;
  data.shots_per_basis = static_cast<std::uint64_t>(shots_per_basis);
  for (auto a : kLocalBases) {
    for (auto b : kLocalBases) {
      data.counts[static_cast<int>(a)][static_cast<int>(b)] =
          sample_counts(outcome_probs(state, a, b), shots_per_basis, rng);
    }
  }
  return data;
}

Mat4 linear_inversion(const TomoDataset& data) {
  data.validate();
  return reconstruct(frequencies(data));
}

Mat4 linear_inversion(const ExactMoments& moments) { return reconstruct(moments.probs); }

Eigen::Vector4d project_to_simplex(const Eigen::Vector4d& values) {
  std::array<double, 4> sorted{values(0), values(1), values(2), values(3)};
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double shift = 0.0;
  for (int j = 0; j < 4; ++j) {
    cumulative += sorted[j];
    const double candidate = (cumulative - 1.0) / (j + 1);
    if (sorted[j] - candidate > 0.0) shift = candidate;
  }
  return (values.array() - shift).max(0.0).matrix();
}

DensityMatrix project_physical(const Mat4& estimate) {
  const double herm = (estimate - estimate.adjoint()).cwiseAbs().maxCoeff();
  const double trace_dev = std::abs(estimate.trace() - Complex(1.0, 0.0));
  if (herm > tol::kChannel || trace_dev > tol::kChannel) {
    throw ContractViolation("project_physical needs a Hermitian unit-trace input");
  }
  Eigen::SelfAdjointEigenSolver<Mat4> solver(0.5 * (estimate + estimate.adjoint()));
  const Eigen::Vector4d weights = project_to_simplex(solver.eigenvalues());
  const Mat4& vecs = solver.eigenvectors();
  return trusted_density(vecs * weights.cast<Complex>().asDiagonal() * vecs.adjoint());
}

FidelityReport fidelity_with_error(const TomoDataset& data, const PureState& target,
                                   std::size_t resamples, Rng& rng) {
  if (resamples < kMinResamples) {
    throw ContractViolation(fmt::format("need at least {} bootstrap resamples", kMinResamples));
  }
  data.validate();
  const BasisTable<Probs4> freq = frequencies(data);
  FidelityReport report;
  report.fidelity = fidelity(project_physical(reconstruct(freq)), target);
  report.resamples = resamples;

  const std::uint64_t base = rng.next_u64();
  const auto shots = static_cast<std::int64_t>(data.shots_per_basis);
  std::vector<double> stats(resamples);
  for (std::size_t r = 0; r < resamples; ++r) {
    Rng stream(Rng::derive(base, r, kBootstrapTag));
    TomoDataset resampled;
    resampled.shots_per_basis = data.shots_per_basis;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) resampled.counts[a][b] = sample_counts(freq[a][b], shots, stream);
    stats[r] = fidelity(project_physical(reconstruct(frequencies(resampled))), target);
  }
  report.sigma = sample_stddev(stats);
  return report;
}

FidelityReport fidelity_with_error(const ExactMoments& moments, const PureState& target,
                                   std::size_t resamples) {
  if (resamples < kMinResamples) {
    throw ContractViolation(fmt::format("need at least {} bootstrap resamples", kMinResamples));
  }
  // Infinite-shot data has no sampling spread.
  return {fidelity(project_physical(reconstruct(moments.probs)), target), 0.0, resamples};
}

std::string to_csv(const TomoDataset& data) {
  std::string out = "basisA,basisB,outcome,count\n";
  for (auto a : kLocalBases) {
    for (auto b : kLocalBases) {
      const Counts4& cell = data.at(a, b);
      for (int k = 0; k < 4; ++k) {
        out += fmt::format("{},{},{},{}\n", to_string(a), to_string(b), kOutcomeNames[k], cell[k]);
      }
    }
  }
  return out;
}

TomoDataset dataset_from_csv(std::string_view csv) {
  const auto lines = detail::lines_of(csv);
  if (lines.empty() || lines[0] != "basisA,basisB,outcome,count") {
    throw std::runtime_error("tomography csv: missing header");
  }
  if (lines.size() != 37) throw std::runtime_error("tomography csv: expected 36 data lines");
  TomoDataset data;
  BasisTable<std::array<bool, 4>> seen{};
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = detail::split(lines[i], ',');
    if (fields.size() != 4) throw std::runtime_error("tomography csv: expected 4 fields");
    const int a = static_cast<int>(parse_local_basis(fields[0]));
    const int b = static_cast<int>(parse_local_basis(fields[1]));
    const auto it = std::find(kOutcomeNames.begin(), kOutcomeNames.end(), fields[2]);
    if (it == kOutcomeNames.end()) throw std::runtime_error("tomography csv: bad outcome");
    const auto k = static_cast<std::size_t>(it - kOutcomeNames.begin());
    if (seen[a][b][k]) throw std::runtime_error("tomography csv: repeated cell");
    seen[a][b][k] = true;
    data.counts[a][b][k] = detail::parse_or_throw<std::uint64_t>(fields[3], "tomography csv");
  }
  const auto& first = data.counts[0][0];
  data.shots_per_basis = std::accumulate(first.begin(), first.end(), std::uint64_t{0});
  data.validate();
  return data;
}

}  // namespace qsdc
