#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "hexhadron/error.hpp"
#include "hexhadron/lattice.hpp"
#include "hexhadron/statevector.hpp"

namespace hexhadron {

/// Zero-momentum sectors of the low-energy excitations above |Z+>, in basis order:
/// one flipped A spin; one flipped B spin together with 0, 1, 2 or all 3 of its A neighbours.
enum class Sector : std::size_t { A = 0, B0 = 1, B1 = 2, B2 = 3, B3 = 4 };

inline constexpr std::size_t kNumSectors = 5;

/// Projected Hamiltonian in the order (A, B0, B1, B2, B3), |Z+> energy set to zero.
/// The couplings form the chain A-B1, B0-B1, B1-B2, B2-B3.
struct ProjectedHamiltonian {
  Eigen::Matrix<double, 5, 5> matrix;
  double J = 1.0;
  double h = 0.0;
};

inline ProjectedHamiltonian build_projected_hamiltonian(double J, double h) {
  if (!(J > 0.0)) throw Error(ErrorKind::NonPositiveJ, "J must be positive");
  const double r2 = std::sqrt(2.0) * h;
  const double r3 = std::sqrt(3.0) * h;
  ProjectedHamiltonian ph;
  ph.J = J;
  ph.h = h;
  // clang-format off
  ph.matrix << 4 * J, 0,     r2,    0,     0,
               0,     6 * J, r3,    0,     0,
               r2,    r3,    6 * J, 2 * h, 0,
               0,     0,     2 * h, 6 * J, r3,
               0,     0,     0,     r3,    6 * J;
  // clang-format on
  return ph;
}

struct MassDifference {
  std::size_t i = 0;
  std::size_t j = 0;
  double value = 0.0;
};

struct MassSpectrum {
  std::array<double, 5> masses{};             // ascending, units of J
  std::vector<MassDifference> differences;  // |m_i - m_j| for i < j, 10 entries

  /// Every frequency the model predicts: the masses followed by the differences.
  std::vector<double> lines() const {
    std::vector<double> out(masses.begin(), masses.end());
    for (const auto& d : differences) out.push_back(d.value);
    return out;
  }
};

inline MassSpectrum quasiparticle_masses(double J, double h) {
  const ProjectedHamiltonian ph = build_projected_hamiltonian(J, h);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 5, 5>> eig(ph.matrix, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw Error(ErrorKind::NumericalFailure, "eigensolver failed");
  MassSpectrum out;
  for (std::size_t k = 0; k < 5; ++k) out.masses[k] = eig.eigenvalues()(static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = i + 1; j < 5; ++j) out.differences.push_back({i, j, std::abs(out.masses[i] - out.masses[j])});
  }
  return out;
}

/// Zero-momentum reference states of the five sectors (A, B0, B1, B2, B3) on a periodic cluster.
inline std::array<StateVector, kNumSectors> projected_hamiltonian_reference_basis(
    const FiniteCluster& cluster, std::size_t cap = kDefaultClusterCap) {
  const auto& g = cluster.graph;
  const std::size_t n = g.n_sites();
  check_cap(n, cap);
  if (!cluster.periodic || !g.is_valid_heavy_hex()) {
    throw Error(ErrorKind::InvalidArgument, "reference basis needs a periodic heavy-hex cluster");
  }
  std::array<StateVector, kNumSectors> out;
  for (auto& v : out) v = StateVector{n, Eigen::VectorXcd::Zero(Eigen::Index{1} << n)};
  auto bit = [](SiteId s) { return std::uint64_t{1} << s; };
  auto add = [&](Sector sec, std::uint64_t config) { out[static_cast<std::size_t>(sec)].amp(static_cast<Eigen::Index>(config)) += 1.0; };
  for (SiteId a : g.sites_of(Sublattice::A)) add(Sector::A, bit(a));
  for (SiteId b : g.sites_of(Sublattice::B)) {
    const auto nb = g.neighbors(b);
    add(Sector::B0, bit(b));
    for (SiteId a : nb) add(Sector::B1, bit(b) | bit(a));
    for (std::size_t i = 0; i < nb.size(); ++i) {
      for (std::size_t j = i + 1; j < nb.size(); ++j) add(Sector::B2, bit(b) | bit(nb[i]) | bit(nb[j]));
    }
    add(Sector::B3, bit(b) | bit(nb[0]) | bit(nb[1]) | bit(nb[2]));
  }
  for (auto& v : out) v.amp /= v.amp.norm();
  return out;
}

}  // namespace hexhadron
