#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "hexhadron/bp.hpp"

namespace hexhadron {

inline constexpr double kImaginaryResidueTol = 1e-6;

namespace detail {

inline double checked_real(Complex z) {
  if (std::abs(z.imag()) > kImaginaryResidueTol * std::max(1.0, std::abs(z.real()))) {
    throw Error(ErrorKind::ImaginaryResidueTooLarge, "expectation value has an imaginary part");
  }
  return z.real();
}

inline DenseTensor apply_physical(const DenseTensor& t, const Eigen::Matrix2cd& op) {
  // sum_p op(p', p) t[p] == absorb with op^T.
  return absorb(t, Matrix(op.transpose()), kPhysLabel);
}

}  // namespace detail

/// <sigma^x>, <sigma^y>, <sigma^z> at one site from a single dressing.
inline std::array<double, 3> site_expectations(const TensorNetworkState& state, const MessageSet& msgs, SiteId site) {
  const DenseTensor d = dress_with_messages(state, msgs, site, state.cell().incident(site));
  const DenseTensor& t = state.tensor(site);
  const double norm = inner(t, d).real();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw Error(ErrorKind::NonPositiveNorm, "site norm is not positive");
  std::array<double, 3> out{};
  const std::array<Pauli, 3> ops{Pauli::X, Pauli::Y, Pauli::Z};
  for (std::size_t k = 0; k < 3; ++k) {
    out[k] = detail::checked_real(inner(t, detail::apply_physical(d, pauli_matrix(ops[k])))) / norm;
  }
  return out;
}

inline double local_expectation(const TensorNetworkState& state, const MessageSet& msgs, SiteId site, Pauli p) {
  const auto all = site_expectations(state, msgs, site);
  return all[static_cast<std::size_t>(p)];
}

/// Schmidt-like spectrum on one bond: nonincreasing, sum of squares one.
using BondSpectrum = std::vector<double>;

/// Vidal-gauge bond spectra: singular values of sqrt(M_{b->a})^T sqrt(M_{a->b}) per edge.
inline std::vector<BondSpectrum> vidal_bond_spectra(const TensorNetworkState& state, const MessageSet& msgs) {
  const auto& g = state.cell();
  std::vector<BondSpectrum> out;
  for (EdgeId e = 0; e < g.n_edges(); ++e) {
    const Matrix ra = hermitian_root(msgs[2 * e], RootMode::Sqrt);
    const Matrix rb = hermitian_root(msgs[2 * e + 1], RootMode::Sqrt);
    const Matrix prod = ra.transpose() * rb;
    Eigen::JacobiSVD<Matrix> svd(prod);
    Eigen::VectorXd s = svd.singularValues();
    const double n2 = s.squaredNorm();
    if (!(n2 > 0.0)) throw Error(ErrorKind::NonPositiveNorm, "bond spectrum vanished");
    s /= std::sqrt(n2);
    out.emplace_back(s.data(), s.data() + s.size());
  }
  return out;
}

/// s = -sum lambda^2 log2(lambda^2), with 0 log 0 = 0.
inline double entanglement_density(const BondSpectrum& lambda) {
  double s = 0.0;
  for (double l : lambda) {
    const double p = l * l;
    if (p > 0.0) s -= p * std::log2(p);
  }
  return std::max(s, 0.0);
}

struct CorrelatorSample {
  Sublattice start;
  std::size_t d = 0;
  double value = 0.0;
};

namespace detail {

// Contracts the path chain with optional one-site operators at either end and returns
// the scalar. The running environment is a [ket, bra] matrix on the outgoing path bond.
inline Complex contract_chain(const TensorNetworkState& state, const MessageSet& msgs, const GeodesicPath& path,
                              const std::optional<Eigen::Matrix2cd>& op_first,
                              const std::optional<Eigen::Matrix2cd>& op_last) {
  std::optional<Matrix> env;  // on the bond joining node k-1 and k
  std::optional<EdgeId> env_edge;
  const std::size_t n = path.nodes.size();
  for (std::size_t k = 0; k < n; ++k) {
    const PathNode& node = path.nodes[k];
    const DenseTensor& t = state.tensor(node.site);
    std::vector<EdgeId> capped = node.off_path;
    DenseTensor ket = dress_with_messages(state, msgs, node.site, capped);
    if (env) ket = absorb(ket, *env, edge_label(*env_edge));
    if (k == 0 && op_first) ket = apply_physical(ket, *op_first);
    if (k + 1 == n && op_last) ket = apply_physical(ket, *op_last);
    std::vector<IndexPair> pairs{{kPhysLabel, kPhysLabel}};
    for (EdgeId e : capped) pairs.emplace_back(edge_label(e), edge_label(e));
    if (env_edge) pairs.emplace_back(edge_label(*env_edge), edge_label(*env_edge));
    if (k + 1 == n) {
      return inner(t, ket);
    }
    const EdgeId out_edge = node.on_path.back();
    const std::string l = edge_label(out_edge);
    const DenseTensor bra = t.conj().relabelled(l, l + "*");
    const DenseTensor m = contract(ket, bra, pairs);
    env = to_matrix(m, {l});
    env_edge = out_edge;
  }
  return {};
}

}  // namespace detail

/// <O_i O'_j> - <O_i><O'_j> along a path. All terms come from the same chain, so an
/// identity at either end gives exactly zero.
inline double connected_correlator(const TensorNetworkState& state, const MessageSet& msgs, const GeodesicPath& path,
                                   const Eigen::Matrix2cd& op_first, const Eigen::Matrix2cd& op_last) {
  const Complex z0 = detail::contract_chain(state, msgs, path, std::nullopt, std::nullopt);
  if (!(z0.real() > 0.0) || !std::isfinite(z0.real())) {
    throw Error(ErrorKind::ChainNormNonPositive, "chain norm is not positive");
  }
  const double both = detail::checked_real(detail::contract_chain(state, msgs, path, op_first, op_last) / z0);
  const double first = detail::checked_real(detail::contract_chain(state, msgs, path, op_first, std::nullopt) / z0);
  const double last = detail::checked_real(detail::contract_chain(state, msgs, path, std::nullopt, op_last) / z0);
  return both - first * last;
}

/// Connected sigma^z correlator along a geodesic. Other Paulis need the experimental flag.
inline CorrelatorSample two_point_correlator(const TensorNetworkState& state, const MessageSet& msgs,
                                             const GeodesicPath& path, Pauli p = Pauli::Z,
                                             bool allow_experimental = false) {
  if (p != Pauli::Z && !allow_experimental) {
    throw Error(ErrorKind::InvalidArgument, "only sigma^z correlators are supported without the experimental flag");
  }
  if (path.length < 1) throw Error(ErrorKind::InvalidArgument, "correlator distance must be at least 1");
  const Eigen::Matrix2cd op = pauli_matrix(p);
  return {path.start, path.length, connected_correlator(state, msgs, path, op, op)};
}

inline CorrelatorSample two_point_correlator(const TensorNetworkState& state, const MessageSet& msgs,
                                             Sublattice start, std::size_t d) {
  if (d < 1) throw Error(ErrorKind::InvalidArgument, "correlator distance must be at least 1");
  return two_point_correlator(state, msgs, geodesic(start, d));
}

}  // namespace hexhadron
