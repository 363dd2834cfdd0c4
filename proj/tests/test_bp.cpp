#include <gtest/gtest.h>

#include "hexhadron/bp.hpp"
#include "support.hpp"

using namespace hexhadron;
using namespace testing_support;

namespace {

// Every site tensor is phi(p) times one vector per bond, so the network is a product over
// bonds and the exact fixed point is known in closed form.
struct FactorizedState {
  TensorNetworkState state;
  std::vector<Eigen::Vector2cd> phi;
  std::vector<std::vector<Eigen::VectorXcd>> v;  // v[site][k] for incident edge k
};

FactorizedState factorized_state(std::size_t chi) {
  const HeavyHexUnitCell cell = build_unit_cell();
  FactorizedState f{TensorNetworkState(cell), {}, {}};
  for (SiteId s = 0; s < cell.n_sites(); ++s) {
    Eigen::Vector2cd phi(gauss(), gauss());
    std::vector<Eigen::VectorXcd> vs;
    std::vector<Index> idx{physical_index(kPhysLabel)};
    for (EdgeId e : cell.incident(s)) {
      vs.push_back(random_matrix(static_cast<Eigen::Index>(chi), 1).col(0));
      idx.push_back(virtual_index(edge_label(e), chi));
    }
    DenseTensor t(idx);
    std::vector<std::size_t> pos(t.rank());
    for (std::size_t flat = 0; flat < t.size(); ++flat) {
      std::size_t rem = flat;
      for (std::size_t k = t.rank(); k-- > 0;) {
        pos[k] = rem % t.index(k).dim;
        rem /= t.index(k).dim;
      }
      Complex z = phi(static_cast<Eigen::Index>(pos[0]));
      for (std::size_t k = 1; k < t.rank(); ++k) z *= vs[k - 1](static_cast<Eigen::Index>(pos[k]));
      t.data()[flat] = z;
    }
    f.state.set_tensor(s, std::move(t));
    f.phi.push_back(phi);
    f.v.push_back(std::move(vs));
  }
  return f;
}

const Eigen::VectorXcd& bond_vector(const FactorizedState& f, SiteId s, EdgeId e) {
  const auto& inc = f.state.cell().incident(s);
  for (std::size_t k = 0; k < inc.size(); ++k) {
    if (inc[k] == e) return f.v[s][k];
  }
  throw std::logic_error("edge not incident");
}

MessageSet random_messages(const TensorNetworkState& st) {
  MessageSet m(st.cell().n_edges());
  for (EdgeId e = 0; e < st.cell().n_edges(); ++e) {
    const auto chi = static_cast<Eigen::Index>(st.bond_dim(e));
    for (int k = 0; k < 2; ++k) {
      Matrix p = random_psd(chi, 0.1);
      m[2 * e + k] = p / p.trace();
    }
  }
  return m;
}

}  // namespace

TEST(Messages, InitIsNormalizedIdentity) {
  const TensorNetworkState st = random_state(3);
  const MessageSet m = init_messages(st);
  ASSERT_EQ(m.size(), 12u);
  for (std::size_t k = 0; k < m.size(); ++k) {
    EXPECT_TRUE(message_invariants_hold(m[k]));
    EXPECT_LE((m[k] - Matrix::Identity(3, 3) / 3.0).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(Messages, SlotConvention) {
  const HeavyHexUnitCell cell = build_unit_cell();
  for (EdgeId e = 0; e < cell.n_edges(); ++e) {
    EXPECT_EQ(MessageSet::slot(cell, e, cell.edge(e).b), 2 * e);
    EXPECT_EQ(MessageSet::slot(cell, e, cell.edge(e).a), 2 * e + 1);
  }
}

TEST(BeliefPropagation, ProductStateIsTrivial) {
  std::vector<Eigen::Vector2cd> local(5, Eigen::Vector2cd(0.6, Complex(0.0, 0.8)));
  const TensorNetworkState st = TensorNetworkState::product(local);
  MessageSet m = init_messages(st);
  const BPReport rep = bp_fixed_point(st, m);
  EXPECT_TRUE(rep.converged);
  EXPECT_EQ(rep.iterations, 1u);
  for (std::size_t k = 0; k < m.size(); ++k) EXPECT_NEAR(std::abs(m[k](0, 0) - 1.0), 0.0, 1e-15);
  for (SiteId s = 0; s < 5; ++s) EXPECT_NEAR(bp_norm(st, m, s), 1.0, 1e-15);
}

TEST(BeliefPropagation, FactorizedStateClosedForm) {
  const FactorizedState f = factorized_state(3);
  const auto& g = f.state.cell();
  MessageSet m = init_messages(f.state);
  const BPReport rep = bp_fixed_point(f.state, m);
  ASSERT_TRUE(rep.converged);
  for (EdgeId e = 0; e < g.n_edges(); ++e) {
    for (SiteId from : {g.edge(e).b, g.edge(e).a}) {
      const Eigen::VectorXcd& v = bond_vector(f, from, e);
      const Matrix want = v * v.adjoint() / v.squaredNorm();
      EXPECT_LE((m.outgoing(g, e, from) - want).cwiseAbs().maxCoeff(), 1e-12) << "edge " << e << " from " << from;
    }
    const Eigen::VectorXcd& vb = bond_vector(f, g.edge(e).b, e);
    const Eigen::VectorXcd& va = bond_vector(f, g.edge(e).a, e);
    const double want_overlap = std::norm(vb.dot(va.conjugate())) / (vb.squaredNorm() * va.squaredNorm());
    EXPECT_NEAR(bp_edge_overlap(g, m, e), want_overlap, 1e-12);
  }
  for (SiteId s = 0; s < g.n_sites(); ++s) {
    double want = f.phi[s].squaredNorm();
    for (EdgeId e : g.incident(s)) {
      const Eigen::VectorXcd& mine = bond_vector(f, s, e);
      const Eigen::VectorXcd& theirs = bond_vector(f, g.other(e, s), e);
      // incoming message theirs theirs^dag / |theirs|^2 closed against mine on ket and bra
      want *= std::norm(theirs.dot(mine.conjugate())) / theirs.squaredNorm();
    }
    EXPECT_NEAR(bp_norm(f.state, m, s) / want, 1.0, 1e-11) << "site " << s;
  }
}

TEST(BeliefPropagation, FixedPointAndInvariants) {
  const TensorNetworkState st = random_state(3);
  MessageSet m = init_messages(st);
  BPOptions opt;
  opt.check_invariants = true;
  const BPReport rep = bp_fixed_point(st, m, opt);
  ASSERT_TRUE(rep.converged);
  EXPECT_LE(rep.final_residual, 1e-12);
  const auto& g = st.cell();
  for (const auto& d : g.directed_edges()) {
    const Matrix again = normalized_message(st, m, d.from, d.edge);
    EXPECT_LE((again - m.outgoing(g, d.edge, d.from)).cwiseAbs().maxCoeff(), 1e-11);
    EXPECT_TRUE(message_invariants_hold(m.outgoing(g, d.edge, d.from)));
  }
}

TEST(BeliefPropagation, ScheduleIndependent) {
  const TensorNetworkState st = random_state(2);
  MessageSet sync = init_messages(st);
  MessageSet seq = init_messages(st);
  BPOptions opt;
  ASSERT_TRUE(bp_fixed_point(st, sync, opt).converged);
  opt.schedule = BPSchedule::Sequential;
  ASSERT_TRUE(bp_fixed_point(st, seq, opt).converged);
  for (std::size_t k = 0; k < sync.size(); ++k) EXPECT_LE((sync[k] - seq[k]).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(BeliefPropagation, StartingPointIndependent) {
  const TensorNetworkState st = random_state(2);
  MessageSet a = init_messages(st);
  MessageSet b = random_messages(st);
  ASSERT_TRUE(bp_fixed_point(st, a).converged);
  ASSERT_TRUE(bp_fixed_point(st, b).converged);
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_LE((a[k] - b[k]).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(BeliefPropagation, SymmetricStateHasEqualMessages) {
  const TensorNetworkState st = symmetric_state(2);
  MessageSet m = init_messages(st);
  ASSERT_TRUE(bp_fixed_point(st, m).converged);
  for (EdgeId e = 1; e < 6; ++e) {
    EXPECT_LE((m[2 * e] - m[0]).cwiseAbs().maxCoeff(), 1e-11) << "B to A on edge " << e;
    EXPECT_LE((m[2 * e + 1] - m[1]).cwiseAbs().maxCoeff(), 1e-11) << "A to B on edge " << e;
  }
  const double z = bp_norm(st, m, 0);
  for (SiteId s = 1; s < 3; ++s) EXPECT_NEAR(bp_norm(st, m, s) / z, 1.0, 1e-11);
}

TEST(BeliefPropagation, ScalingOneTensor) {
  TensorNetworkState st = random_state(2);
  MessageSet m = init_messages(st);
  ASSERT_TRUE(bp_fixed_point(st, m).converged);
  const double before = bp_norm(st, m, 3);
  DenseTensor t = st.tensor(3);
  for (auto& z : t.data()) z *= 2.0;
  st.set_tensor(3, t);
  MessageSet m2 = m;
  ASSERT_TRUE(bp_fixed_point(st, m2).converged);
  for (std::size_t k = 0; k < m.size(); ++k) EXPECT_LE((m[k] - m2[k]).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(bp_norm(st, m2, 3) / before, 4.0, 1e-10);
}

TEST(BeliefPropagation, CachedKernelMatchesGenericContraction) {
  for (std::size_t chi : {1u, 2u, 3u}) {
    const TensorNetworkState st = random_state(chi);
    const MessageSet m = random_messages(st);
    for (const auto& d : st.cell().directed_edges()) {
      const detail::MessageKernel k(st, d.from, d.edge);
      const Matrix fast = k(st, m);
      const Matrix slow = unnormalized_message(st, m, d.from, d.edge);
      EXPECT_LE((fast - slow).cwiseAbs().maxCoeff() / slow.cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(BeliefPropagation, StaleMessagesRejected) {
  const TensorNetworkState st = random_state(2);
  MessageSet wrong_count(3);
  try {
    bp_fixed_point(st, wrong_count);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::StaleMessages);
  }
  const TensorNetworkState bigger = random_state(3);
  MessageSet small = init_messages(st);
  try {
    bp_fixed_point(bigger, small);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::StaleMessages);
  }
}

TEST(BeliefPropagation, ReportsNonConvergence) {
  const TensorNetworkState st = random_state(3, 0.0);
  MessageSet m = init_messages(st);
  BPOptions opt;
  opt.max_iters = 1;
  const BPReport rep = bp_fixed_point(st, m, opt);
  EXPECT_EQ(rep.iterations, 1u);
  EXPECT_FALSE(rep.converged);
  EXPECT_GT(rep.final_residual, opt.tol);
}

TEST(BeliefPropagation, BadOptions) {
  const TensorNetworkState st = random_state(1);
  MessageSet m = init_messages(st);
  BPOptions opt;
  opt.tol = 0.0;
  EXPECT_THROW(bp_fixed_point(st, m, opt), Error);
}
