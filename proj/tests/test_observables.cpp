#include <gtest/gtest.h>

#include "hexhadron/evolve.hpp"
#include "hexhadron/observables.hpp"
#include "hexhadron/oracle_ed.hpp"
#include "support.hpp"

using namespace hexhadron;
using namespace testing_support;

namespace {

std::array<double, 3> bloch(const Eigen::Vector2cd& v) {
  const double n = v.squaredNorm();
  std::array<double, 3> out{};
  const std::array<Pauli, 3> ops{Pauli::X, Pauli::Y, Pauli::Z};
  for (std::size_t k = 0; k < 3; ++k) out[k] = v.dot(pauli_matrix(ops[k]) * v).real() / n;
  return out;
}

// Follows a unit-cell geodesic through the periodic cluster starting in cell 0. Cluster
// edge 6c + k is a copy of unit-cell edge k.
std::vector<SiteId> cluster_path(const FiniteCluster& cl, const GeodesicPath& path) {
  std::vector<SiteId> sites{path.nodes[0].site};
  for (std::size_t k = 1; k < path.nodes.size(); ++k) {
    const EdgeId type = path.nodes[k].on_path.front();
    const SiteId here = sites.back();
    bool found = false;
    for (EdgeId e : cl.graph.incident(here)) {
      if (e % 6 == type) {
        sites.push_back(cl.graph.other(e, here));
        found = true;
        break;
      }
    }
    if (!found) throw std::logic_error("path leaves the cluster");
  }
  return sites;
}

}  // namespace

TEST(Local, InitialStates) {
  TensorNetworkState z = initial_state(InitialState::Zplus);
  MessageSet mz = init_messages(z);
  TensorNetworkState y = initial_state(InitialState::Yplus);
  MessageSet my = init_messages(y);
  for (SiteId s = 0; s < 5; ++s) {
    const auto ez = site_expectations(z, mz, s);
    EXPECT_NEAR(ez[0], 0.0, 1e-15);
    EXPECT_NEAR(ez[1], 0.0, 1e-15);
    EXPECT_NEAR(ez[2], 1.0, 1e-15);
    EXPECT_NEAR(local_expectation(y, my, s, Pauli::Y), 1.0, 1e-15);
    EXPECT_NEAR(local_expectation(y, my, s, Pauli::X), 0.0, 1e-15);
  }
}

TEST(Local, RandomProductMatchesBlochVector) {
  std::vector<Eigen::Vector2cd> local;
  for (int s = 0; s < 5; ++s) local.emplace_back(gauss(), gauss());
  const TensorNetworkState st = TensorNetworkState::product(local);
  MessageSet m = init_messages(st);
  bp_fixed_point(st, m);
  for (SiteId s = 0; s < 5; ++s) {
    const auto got = site_expectations(st, m, s);
    const auto want = bloch(local[s]);
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(got[k], want[k], 1e-14);
  }
}

TEST(Local, BoundedOnRandomStates) {
  const TensorNetworkState st = random_state(3);
  MessageSet m = init_messages(st);
  ASSERT_TRUE(bp_fixed_point(st, m).converged);
  for (SiteId s = 0; s < 5; ++s) {
    const auto e = site_expectations(st, m, s);
    EXPECT_LE(e[0] * e[0] + e[1] * e[1] + e[2] * e[2], 1.0 + 1e-12);
  }
}

TEST(Local, ImaginaryResidue) {
  EXPECT_NEAR(detail::checked_real(Complex(0.5, 1e-9)), 0.5, 0.0);
  try {
    detail::checked_real(Complex(0.5, 1e-3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ImaginaryResidueTooLarge);
  }
}

TEST(Entropy, SpotValues) {
  EXPECT_DOUBLE_EQ(entanglement_density({1.0}), 0.0);
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(entanglement_density({r, r}), 1.0, 1e-15);
  EXPECT_NEAR(entanglement_density({std::sqrt(0.9), std::sqrt(0.1)}), 0.46899559358928122, 1e-15);
  EXPECT_NEAR(entanglement_density({0.5, 0.5, 0.5, 0.5}), 2.0, 1e-15);
  EXPECT_DOUBLE_EQ(entanglement_density({1.0, 0.0}), 0.0);
}

TEST(Entropy, BellBondSpectrum) {
  TensorNetworkState st = initial_state(InitialState::Zplus);
  MessageSet m = init_messages(st);
  Matrix u = Matrix::Zero(4, 4);
  const double r = 1.0 / std::sqrt(2.0);
  u << r, 0, 0, r, 0, r, r, 0, 0, r, -r, 0, r, 0, 0, -r;
  apply_two_site_simple_update(st, m, 4, u, {0.0, std::nullopt});
  ASSERT_TRUE(bp_fixed_point(st, m).converged);
  const auto spectra = vidal_bond_spectra(st, m);
  for (EdgeId e = 0; e < 6; ++e) {
    if (e == 4) {
      ASSERT_EQ(spectra[e].size(), 2u);
      EXPECT_NEAR(spectra[e][0], r, 1e-12);
      EXPECT_NEAR(spectra[e][1], r, 1e-12);
    } else {
      ASSERT_EQ(spectra[e].size(), 1u);
      EXPECT_NEAR(spectra[e][0], 1.0, 1e-15);
    }
  }
  EXPECT_NEAR(mean_entanglement_density(st, m), 1.0 / 6.0, 1e-12);
}

TEST(Correlator, ProductStateVanishes) {
  std::vector<Eigen::Vector2cd> local;
  for (int s = 0; s < 5; ++s) local.emplace_back(gauss(), gauss());
  const TensorNetworkState st = TensorNetworkState::product(local);
  MessageSet m = init_messages(st);
  bp_fixed_point(st, m);
  for (Sublattice s : {Sublattice::A, Sublattice::B}) {
    for (std::size_t d = 1; d <= 6; ++d) EXPECT_NEAR(two_point_correlator(st, m, s, d).value, 0.0, 1e-14);
  }
}

TEST(Correlator, IdentityAtEitherEndGivesZero) {
  const TensorNetworkState st = random_state(2);
  MessageSet m = init_messages(st);
  ASSERT_TRUE(bp_fixed_point(st, m).converged);
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  const Eigen::Matrix2cd z = pauli_matrix(Pauli::Z);
  for (std::size_t d = 1; d <= 4; ++d) {
    const auto path = geodesic(Sublattice::B, d);
    EXPECT_NEAR(connected_correlator(st, m, path, id, z), 0.0, 1e-14);
    EXPECT_NEAR(connected_correlator(st, m, path, z, id), 0.0, 1e-14);
  }
}

TEST(Correlator, EndpointsReproduceLocalValues) {
  // With identity in the middle the chain factorizes into site environments, so
  // <O_first> from the chain equals the single-site BP expectation.
  const TensorNetworkState st = random_state(2);
  MessageSet m = init_messages(st);
  ASSERT_TRUE(bp_fixed_point(st, m).converged);
  const auto path = geodesic(Sublattice::A, 3);
  const Complex z0 = detail::contract_chain(st, m, path, std::nullopt, std::nullopt);
  const Complex zf = detail::contract_chain(st, m, path, pauli_matrix(Pauli::Z), std::nullopt);
  EXPECT_NEAR((zf / z0).real(), local_expectation(st, m, path.nodes[0].site, Pauli::Z), 1e-10);
}

TEST(Correlator, MatchesExactEvolutionAfterShallowCircuit) {
  // Two Trotter steps from the all-up state on the 20-site torus, compared with the
  // same gates applied to the full state vector.
  const double J = 1.0, h = 0.5, dt = 0.15;
  QuenchConfig cfg;
  cfg.J = J;
  cfg.h = h;
  cfg.dt = dt;
  cfg.t_max = 2 * dt;
  cfg.sample_every = 2;
  cfg.correlator_dmax = 3;
  const TimeSeries ts = run_quench(cfg);

  const FiniteCluster cl = build_finite_cluster(2, 2);
  StateVector psi = StateVector::product(cl.n_sites(), Eigen::Vector2cd(1.0, 0.0));
  const auto gates = trotter_step_gates(cl.graph, J, h, dt);
  apply_gates(psi, gates);
  apply_gates(psi, gates);

  double mz_a = 0.0;
  for (SiteId s = 0; s < cl.n_sites(); ++s) {
    if (cl.graph.sublattice(s) == Sublattice::A) mz_a += exact_expectation(psi, s, Pauli::Z);
  }
  mz_a /= static_cast<double>(cl.graph.count(Sublattice::A));
  EXPECT_NEAR(ts.rows.back().mz_a, mz_a, 1e-6);

  for (const auto& row : ts.correlators) {
    if (row.t < cfg.t_max - 1e-12) continue;
    const auto sites = cluster_path(cl, geodesic(row.start, row.d));
    const double want = exact_correlator(psi, sites.front(), sites.back());
    EXPECT_NEAR(row.value, want, 1e-6) << "d=" << row.d;
  }
}

TEST(Correlator, Rejections) {
  const TensorNetworkState st = initial_state(InitialState::Zplus);
  MessageSet m = init_messages(st);
  try {
    two_point_correlator(st, m, geodesic(Sublattice::A, 2), Pauli::X);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument);
  }
  EXPECT_NO_THROW(two_point_correlator(st, m, geodesic(Sublattice::A, 2), Pauli::X, true));
  EXPECT_THROW(two_point_correlator(st, m, Sublattice::A, 0), Error);
}
