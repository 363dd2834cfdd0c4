#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "hexhadron/lattice.hpp"
#include "hexhadron/tensor.hpp"

namespace hexhadron {

enum class Pauli { X, Y, Z };

inline Eigen::Matrix2cd pauli_matrix(Pauli p) {
  const Complex i{0.0, 1.0};
  Eigen::Matrix2cd m;
  switch (p) {
    case Pauli::X: m << 0.0, 1.0, 1.0, 0.0; break;
    case Pauli::Y: m << 0.0, -i, i, 0.0; break;
    case Pauli::Z: m << 1.0, 0.0, 0.0, -1.0; break;
  }
  return m;
}

inline const std::string kPhysLabel = "p";

/// Unit-cell tensor network for the infinite lattice. Site tensors carry the physical
/// index "p" and one virtual index per incident edge, labelled by edge_label(e).
class TensorNetworkState {
 public:
  explicit TensorNetworkState(HeavyHexUnitCell cell = {}) : cell_(std::move(cell)), tensors_(cell_.n_sites()) {}

  /// Bond-dimension-1 product state with the given single-site amplitudes.
  static TensorNetworkState product(const std::vector<Eigen::Vector2cd>& local, HeavyHexUnitCell cell = {}) {
    TensorNetworkState st(std::move(cell));
    if (local.size() != st.cell_.n_sites()) throw Error(ErrorKind::DimensionMismatch, "one amplitude pair per site");
    for (SiteId s = 0; s < st.cell_.n_sites(); ++s) {
      std::vector<Index> idx{physical_index(kPhysLabel)};
      for (EdgeId e : st.cell_.incident(s)) idx.push_back(virtual_index(edge_label(e), 1));
      DenseTensor t(std::move(idx));
      t.data()[0] = local[s](0);
      t.data()[1] = local[s](1);
      st.tensors_[s] = std::move(t);
    }
    return st;
  }

  const HeavyHexUnitCell& cell() const { return cell_; }
  const DenseTensor& tensor(SiteId s) const { return tensors_.at(s); }

  void set_tensor(SiteId s, DenseTensor t) {
    if (!t.has(kPhysLabel) || t.dim(kPhysLabel) != 2 || t.rank() != cell_.degree(s) + 1) {
      throw Error(ErrorKind::DimensionMismatch, "site tensor does not match the unit-cell graph");
    }
    for (EdgeId e : cell_.incident(s)) {
      if (!t.has(edge_label(e))) throw Error(ErrorKind::DimensionMismatch, "missing virtual index " + edge_label(e));
    }
    tensors_.at(s) = std::move(t);
  }

  /// Replaces the two tensors sharing edge `e` at once (their bond may change size).
  void set_pair(EdgeId e, DenseTensor tb, DenseTensor ta) {
    const Edge& ed = cell_.edge(e);
    const std::string l = edge_label(e);
    if (tb.dim(l) != ta.dim(l)) throw Error(ErrorKind::DimensionMismatch, "bond dimensions disagree on " + l);
    set_tensor(ed.b, std::move(tb));
    set_tensor(ed.a, std::move(ta));
  }

  std::size_t bond_dim(EdgeId e) const { return tensors_.at(cell_.edge(e).b).dim(edge_label(e)); }

  std::size_t max_bond_dim() const {
    std::size_t m = 0;
    for (EdgeId e = 0; e < cell_.n_edges(); ++e) m = std::max(m, bond_dim(e));
    return m;
  }

  /// Index structure matches the graph and shared bonds agree in dimension.
  bool is_consistent() const {
    for (SiteId s = 0; s < cell_.n_sites(); ++s) {
      const auto& t = tensors_[s];
      if (t.rank() != cell_.degree(s) + 1 || !t.has(kPhysLabel)) return false;
    }
    for (EdgeId e = 0; e < cell_.n_edges(); ++e) {
      const auto l = edge_label(e);
      const auto& tb = tensors_[cell_.edge(e).b];
      const auto& ta = tensors_[cell_.edge(e).a];
      if (!tb.has(l) || !ta.has(l) || tb.dim(l) != ta.dim(l)) return false;
    }
    return true;
  }

 private:
  HeavyHexUnitCell cell_;
  std::vector<DenseTensor> tensors_;
};

}  // namespace hexhadron
