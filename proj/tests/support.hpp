#pragma once

#include <random>
#include <vector>

#include "hexhadron/bp.hpp"
#include "hexhadron/tensor.hpp"

namespace testing_support {

using namespace hexhadron;

inline std::mt19937_64& rng() {
  static std::mt19937_64 g(12345);
  return g;
}

inline Complex gauss() {
  static std::normal_distribution<double> n(0.0, 1.0);
  return {n(rng()), n(rng())};
}

inline DenseTensor random_tensor(std::vector<Index> idx) {
  DenseTensor t(std::move(idx));
  for (auto& z : t.data()) z = gauss();
  return t;
}

inline Matrix random_matrix(Eigen::Index r, Eigen::Index c) {
  Matrix m(r, c);
  for (Eigen::Index k = 0; k < m.size(); ++k) m(k) = gauss();
  return m;
}

inline Matrix random_psd(Eigen::Index n, double shift = 0.0) {
  const Matrix a = random_matrix(n, n);
  return a * a.adjoint() + shift * Matrix::Identity(n, n);
}

/// Unit-cell state with bond dimension chi on every edge. A large product component
/// keeps BP well conditioned.
inline TensorNetworkState random_state(std::size_t chi, double product_weight = 3.0) {
  const HeavyHexUnitCell cell = build_unit_cell();
  TensorNetworkState st(cell);
  for (SiteId s = 0; s < cell.n_sites(); ++s) {
    std::vector<Index> idx{physical_index(kPhysLabel)};
    for (EdgeId e : cell.incident(s)) idx.push_back(virtual_index(edge_label(e), chi));
    DenseTensor t = random_tensor(idx);
    t.at(std::vector<std::size_t>(t.rank(), 0)) += product_weight;
    st.set_tensor(s, std::move(t));
  }
  return st;
}

/// Same random tensors on both A-type and both B-type roles, so the state has the
/// full unit-cell symmetry.
inline TensorNetworkState symmetric_state(std::size_t chi, double product_weight = 3.0) {
  const HeavyHexUnitCell cell = build_unit_cell();
  TensorNetworkState st(cell);
  DenseTensor ta = random_tensor({physical_index(kPhysLabel), virtual_index("x", chi), virtual_index("y", chi)});
  DenseTensor tb = random_tensor(
      {physical_index(kPhysLabel), virtual_index("x", chi), virtual_index("y", chi), virtual_index("z", chi)});
  ta.at({0, 0, 0}) += product_weight;
  tb.at({0, 0, 0, 0}) += product_weight;
  // symmetrize the B tensor over its three bonds and the A tensor over its two
  DenseTensor tbs = tb;
  for (const auto& perm : std::vector<std::vector<std::string>>{{"p", "x", "z", "y"}, {"p", "y", "x", "z"},
                                                                {"p", "y", "z", "x"}, {"p", "z", "x", "y"},
                                                                {"p", "z", "y", "x"}}) {
    DenseTensor q = tb.permuted(perm);
    for (std::size_t k = 0; k < q.size(); ++k) tbs.data()[k] += q.data()[k];
  }
  DenseTensor tas = ta;
  DenseTensor q = ta.permuted({"p", "y", "x"});
  for (std::size_t k = 0; k < q.size(); ++k) tas.data()[k] += q.data()[k];
  for (SiteId s = 0; s < cell.n_sites(); ++s) {
    DenseTensor t = cell.sublattice(s) == Sublattice::A ? tas : tbs;
    const auto& inc = cell.incident(s);
    const std::vector<std::string> names{"x", "y", "z"};
    for (std::size_t k = 0; k < inc.size(); ++k) t.relabel(names[k], edge_label(inc[k]));
    st.set_tensor(s, std::move(t));
  }
  return st;
}

}  // namespace testing_support
