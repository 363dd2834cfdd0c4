#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "hexhadron/network_state.hpp"

namespace hexhadron {

/// One Hermitian PSD unit-trace matrix per directed edge of the unit cell, indexed
/// [ket, bra]. Slot 2e holds the message B->A on edge e, slot 2e+1 the message A->B.
class MessageSet {
 public:
  MessageSet() = default;
  explicit MessageSet(std::size_t n_edges) : msgs_(2 * n_edges) {}

  static std::size_t slot(const HeavyHexGraph& g, EdgeId e, SiteId from) {
    return 2 * e + (g.edge(e).b == from ? 0 : 1);
  }

  Matrix& operator[](std::size_t slot) { return msgs_.at(slot); }
  const Matrix& operator[](std::size_t slot) const { return msgs_.at(slot); }

  /// Message arriving at `to` along edge `e`.
  const Matrix& incoming(const HeavyHexGraph& g, EdgeId e, SiteId to) const {
    return msgs_.at(slot(g, e, g.other(e, to)));
  }
  const Matrix& outgoing(const HeavyHexGraph& g, EdgeId e, SiteId from) const { return msgs_.at(slot(g, e, from)); }
  Matrix& outgoing(const HeavyHexGraph& g, EdgeId e, SiteId from) { return msgs_.at(slot(g, e, from)); }

  std::size_t size() const { return msgs_.size(); }

 private:
  std::vector<Matrix> msgs_;
};

struct BPReport {
  std::size_t iterations = 0;
  double final_residual = 0.0;
  bool converged = false;
};

enum class BPSchedule { Synchronous, Sequential };

struct BPOptions {
  double tol = 1e-12;
  std::size_t max_iters = 1000;
  BPSchedule schedule = BPSchedule::Synchronous;
  bool check_invariants = false;  // verify Hermitian / PSD / unit trace after every sweep
};

/// Every message set to identity / chi_e.
inline MessageSet init_messages(const TensorNetworkState& state) {
  const auto& g = state.cell();
  MessageSet m(g.n_edges());
  for (EdgeId e = 0; e < g.n_edges(); ++e) {
    const auto chi = static_cast<Eigen::Index>(state.bond_dim(e));
    const Matrix id = Matrix::Identity(chi, chi) / static_cast<double>(chi);
    m[2 * e] = id;
    m[2 * e + 1] = id;
  }
  return m;
}

/// Site tensor with every incoming message on the listed edges absorbed on its ket side.
inline DenseTensor dress_with_messages(const TensorNetworkState& state, const MessageSet& msgs, SiteId site,
                                       const std::vector<EdgeId>& edges) {
  const auto& g = state.cell();
  DenseTensor d = state.tensor(site);
  for (EdgeId e : edges) d = absorb(d, msgs.incoming(g, e, site), edge_label(e));
  return d;
}

inline std::vector<EdgeId> edges_except(const HeavyHexGraph& g, SiteId site, EdgeId skip) {
  std::vector<EdgeId> out;
  for (EdgeId e : g.incident(site)) {
    if (e != skip) out.push_back(e);
  }
  return out;
}

/// Outgoing message from `site` along `e` before trace normalization.
inline Matrix unnormalized_message(const TensorNetworkState& state, const MessageSet& msgs, SiteId site, EdgeId e) {
  const auto& g = state.cell();
  const auto others = edges_except(g, site, e);
  const DenseTensor ket = dress_with_messages(state, msgs, site, others);
  const std::string l = edge_label(e);
  const DenseTensor bra = state.tensor(site).conj().relabelled(l, l + "*");
  std::vector<IndexPair> pairs{{kPhysLabel, kPhysLabel}};
  for (EdgeId o : others) pairs.emplace_back(edge_label(o), edge_label(o));
  const DenseTensor m = contract(ket, bra, pairs);
  return to_matrix(m, {l});
}

/// Hermitian within 1e-10, min eigenvalue >= -1e-10 and unit trace.
inline bool message_invariants_hold(const Matrix& m, double tol = 1e-10) {
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
  if (std::abs(m.trace() - Complex{1.0, 0.0}) > tol) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() >= -tol;
}

namespace detail {
inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return INFINITY;
  return (a - b).cwiseAbs().maxCoeff();
}

// Same update as unnormalized_message, with the site tensor laid out once per BP call so
// that each sweep is a handful of GEMMs. Layouts are [p][e][o] for degree 2, and
// [p][o2][e][o1] plus [p][e][o1][o2] for degree 3.
class MessageKernel {
 public:
  MessageKernel(const TensorNetworkState& state, SiteId site, EdgeId e) : site_(site), edge_(e) {
    const auto& g = state.cell();
    others_ = edges_except(g, site, e);
    const DenseTensor& t = state.tensor(site);
    const std::string le = edge_label(e);
    chi_e_ = t.dim(le);
    for (EdgeId o : others_) chi_o_.push_back(t.dim(edge_label(o)));
    if (others_.size() == 1) {
      first_ = t.permuted({kPhysLabel, le, edge_label(others_[0])});
    } else if (others_.size() == 2) {
      first_ = t.permuted({kPhysLabel, edge_label(others_[1]), le, edge_label(others_[0])});
      second_ = t.permuted({kPhysLabel, le, edge_label(others_[0]), edge_label(others_[1])});
    } else {
      generic_ = true;
    }
  }

  Matrix operator()(const TensorNetworkState& state, const MessageSet& msgs) const {
    if (generic_) return unnormalized_message(state, msgs, site_, edge_);
    const auto& g = state.cell();
    using Map = Eigen::Map<const RowMatrix>;
    const auto ce = static_cast<Eigen::Index>(chi_e_);
    const auto c1 = static_cast<Eigen::Index>(chi_o_[0]);
    const Matrix& m1 = msgs.incoming(g, others_[0], site_);
    if (m1.rows() != c1) throw Error(ErrorKind::StaleMessages, "message size does not match the bond");
    Matrix out = Matrix::Zero(ce, ce);
    if (others_.size() == 1) {
      const Map t(first_.data().data(), 2 * ce, c1);
      const RowMatrix y = t * m1;
      for (Eigen::Index p = 0; p < 2; ++p) {
        out.noalias() += y.middleRows(p * ce, ce) * t.middleRows(p * ce, ce).adjoint();
      }
      return out;
    }
    const auto c2 = static_cast<Eigen::Index>(chi_o_[1]);
    const Matrix& m2 = msgs.incoming(g, others_[1], site_);
    if (m2.rows() != c2) throw Error(ErrorKind::StaleMessages, "message size does not match the bond");
    // dress o1: [p][o2][e][o1] -> [p][o2][e][o1']
    const Map t1(first_.data().data(), 2 * c2 * ce, c1);
    const RowMatrix y1 = t1 * m1;
    // reorder to [p][e][o1'][o2]
    RowMatrix y1p(2 * ce * c1, c2);
    for (Eigen::Index p = 0; p < 2; ++p) {
      for (Eigen::Index b = 0; b < c2; ++b) {
        for (Eigen::Index a = 0; a < ce; ++a) {
          const auto src = y1.row((p * c2 + b) * ce + a);
          for (Eigen::Index o = 0; o < c1; ++o) y1p((p * ce + a) * c1 + o, b) = src(o);
        }
      }
    }
    // dress o2, then close against the bra laid out as [p][e][(o1 o2)]
    const RowMatrix y12 = y1p * m2;
    const Map t2(second_.data().data(), 2 * ce, c1 * c2);
    const Map y(y12.data(), 2 * ce, c1 * c2);
    for (Eigen::Index p = 0; p < 2; ++p) {
      out.noalias() += y.middleRows(p * ce, ce) * t2.middleRows(p * ce, ce).adjoint();
    }
    return out;
  }

 private:
  SiteId site_;
  EdgeId edge_;
  std::vector<EdgeId> others_;
  std::size_t chi_e_ = 0;
  std::vector<std::size_t> chi_o_;
  DenseTensor first_, second_;
  bool generic_ = false;
};

inline Matrix normalize_message(Matrix m) {
  m = 0.5 * (m + m.adjoint()).eval();
  const double tr = m.trace().real();
  if (!(tr > 1e-300) || !std::isfinite(tr)) {
    throw Error(ErrorKind::ZeroTrace, "message trace vanished; the state is null");
  }
  return m / tr;
}
}  // namespace detail

inline Matrix normalized_message(const TensorNetworkState& state, const MessageSet& msgs, SiteId site, EdgeId e) {
  return detail::normalize_message(unnormalized_message(state, msgs, site, e));
}

/// Iterates the message update until the largest entrywise change drops to opts.tol.
/// Non-convergence is reported, not thrown.
inline BPReport bp_fixed_point(const TensorNetworkState& state, MessageSet& msgs, const BPOptions& opts = {}) {
  if (!(opts.tol > 0.0) || opts.max_iters < 1) throw Error(ErrorKind::InvalidArgument, "bad BP options");
  const auto& g = state.cell();
  const auto directed = g.directed_edges();
  if (msgs.size() != directed.size()) throw Error(ErrorKind::StaleMessages, "message set does not match the cell");
  std::vector<detail::MessageKernel> kernels;
  kernels.reserve(directed.size());
  for (const auto& d : directed) kernels.emplace_back(state, d.from, d.edge);
  BPReport rep;
  for (std::size_t it = 1; it <= opts.max_iters; ++it) {
    double residual = 0.0;
    if (opts.schedule == BPSchedule::Synchronous) {
      MessageSet next = msgs;
      for (std::size_t k = 0; k < directed.size(); ++k) {
        next[k] = detail::normalize_message(kernels[k](state, msgs));
        residual = std::max(residual, detail::max_abs_diff(next[k], msgs[k]));
      }
      msgs = std::move(next);
    } else {
      for (std::size_t k = 0; k < directed.size(); ++k) {
        Matrix m = detail::normalize_message(kernels[k](state, msgs));
        residual = std::max(residual, detail::max_abs_diff(m, msgs[k]));
        msgs[k] = std::move(m);
      }
    }
    if (opts.check_invariants) {
      for (std::size_t k = 0; k < msgs.size(); ++k) {
        if (!message_invariants_hold(msgs[k])) {
          throw Error(ErrorKind::NumericalFailure, "message invariant violated during BP sweep");
        }
      }
    }
    rep.iterations = it;
    rep.final_residual = residual;
    if (residual <= opts.tol) {
      rep.converged = true;
      break;
    }
  }
  return rep;
}

/// BP estimate of <psi|psi> restricted to one site: the tensor, its conjugate and all
/// incoming messages, physical index traced.
inline double bp_norm(const TensorNetworkState& state, const MessageSet& msgs, SiteId site) {
  const DenseTensor d = dress_with_messages(state, msgs, site, state.cell().incident(site));
  const Complex z = inner(state.tensor(site), d);
  if (!(z.real() > 0.0) || !std::isfinite(z.real())) {
    throw Error(ErrorKind::NonPositiveNorm, "site norm is not positive");
  }
  return z.real();
}

/// sum_ij M_{b->a}[i,j] M_{a->b}[i,j]: the two messages on edge e closed against each other.
inline double bp_edge_overlap(const HeavyHexGraph& g, const MessageSet& msgs, EdgeId e) {
  (void)g;
  return (msgs[2 * e].cwiseProduct(msgs[2 * e + 1])).sum().real();
}

}  // namespace hexhadron
