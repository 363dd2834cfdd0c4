#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hexhadron/error.hpp"

namespace hexhadron {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RowMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class IndexRole { Physical, Virtual };

struct Index {
  std::string label;
  std::size_t dim = 1;
  IndexRole role = IndexRole::Virtual;

  friend bool operator==(const Index&, const Index&) = default;
};

inline Index physical_index(std::string label) { return {std::move(label), 2, IndexRole::Physical}; }
inline Index virtual_index(std::string label, std::size_t dim) {
  return {std::move(label), dim, IndexRole::Virtual};
}

/// Dense complex tensor with named indices, stored row-major (last index fastest).
class DenseTensor {
 public:
  DenseTensor() = default;

  explicit DenseTensor(std::vector<Index> indices) : indices_(std::move(indices)) {
    check_unique_labels(indices_);
    data_.assign(volume(indices_), Complex{0.0, 0.0});
  }

  DenseTensor(std::vector<Index> indices, std::vector<Complex> data)
      : indices_(std::move(indices)), data_(std::move(data)) {
    check_unique_labels(indices_);
    if (data_.size() != volume(indices_)) {
      throw Error(ErrorKind::DimensionMismatch, "data size does not match index dimensions");
    }
  }

  std::size_t rank() const { return indices_.size(); }
  std::size_t size() const { return data_.size(); }
  const std::vector<Index>& indices() const { return indices_; }
  const Index& index(std::size_t axis) const { return indices_.at(axis); }

  std::span<Complex> data() { return data_; }
  std::span<const Complex> data() const { return data_; }

  bool has(const std::string& label) const {
    return std::any_of(indices_.begin(), indices_.end(),
                       [&](const Index& i) { return i.label == label; });
  }

  std::size_t axis(const std::string& label) const {
    for (std::size_t k = 0; k < indices_.size(); ++k) {
      if (indices_[k].label == label) return k;
    }
    throw Error(ErrorKind::UnknownIndex, "no index labelled '" + label + "'");
  }

  std::size_t dim(const std::string& label) const { return indices_[axis(label)].dim; }

  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    out.reserve(indices_.size());
    for (const auto& i : indices_) out.push_back(i.label);
    return out;
  }

  Complex& at(std::span<const std::size_t> pos) { return data_[offset(pos)]; }
  Complex at(std::span<const std::size_t> pos) const { return data_[offset(pos)]; }
  Complex& at(std::initializer_list<std::size_t> pos) {
    return at(std::span<const std::size_t>(pos.begin(), pos.size()));
  }
  Complex at(std::initializer_list<std::size_t> pos) const {
    return at(std::span<const std::size_t>(pos.begin(), pos.size()));
  }

  DenseTensor& relabel(const std::string& from, std::string to) {
    const std::size_t k = axis(from);
    if (from != to && has(to)) {
      throw Error(ErrorKind::DuplicateIndexName, "label '" + to + "' already present");
    }
    indices_[k].label = std::move(to);
    return *this;
  }

  DenseTensor relabelled(const std::string& from, std::string to) const {
    DenseTensor t = *this;
    t.relabel(from, std::move(to));
    return t;
  }

  DenseTensor conj() const {
    DenseTensor t = *this;
    for (auto& z : t.data_) z = std::conj(z);
    return t;
  }

  DenseTensor& operator*=(Complex s) {
    for (auto& z : data_) z *= s;
    return *this;
  }

  double norm() const {
    double acc = 0.0;
    for (const auto& z : data_) acc += std::norm(z);
    return std::sqrt(acc);
  }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](const Complex& z) {
      return std::isfinite(z.real()) && std::isfinite(z.imag());
    });
  }

  /// Returns a copy whose axes follow `order` (a permutation of this tensor's labels).
  DenseTensor permuted(const std::vector<std::string>& order) const;

  static std::size_t volume(const std::vector<Index>& idx) {
    std::size_t v = 1;
    for (const auto& i : idx) v *= i.dim;
    return v;
  }

 private:
  static void check_unique_labels(const std::vector<Index>& idx) {
    for (std::size_t a = 0; a < idx.size(); ++a) {
      for (std::size_t b = a + 1; b < idx.size(); ++b) {
        if (idx[a].label == idx[b].label) {
          throw Error(ErrorKind::DuplicateIndexName, "duplicate index label '" + idx[a].label + "'");
        }
      }
    }
  }

  std::size_t offset(std::span<const std::size_t> pos) const {
    if (pos.size() != indices_.size()) {
      throw Error(ErrorKind::DimensionMismatch, "wrong number of coordinates");
    }
    std::size_t off = 0;
    for (std::size_t k = 0; k < pos.size(); ++k) off = off * indices_[k].dim + pos[k];
    return off;
  }

  std::vector<Index> indices_;
  std::vector<Complex> data_;
};

namespace detail {

// dst[i_0..i_{r-1}] = src[...] with dst axis k = src axis perm[k].
inline std::vector<Complex> permute_data(std::span<const Complex> src, const std::vector<std::size_t>& src_dims,
                                         const std::vector<std::size_t>& perm) {
  const std::size_t r = perm.size();
  std::vector<Complex> dst(src.size());
  if (src.empty()) return dst;
  bool identity = true;
  for (std::size_t k = 0; k < r; ++k) identity = identity && perm[k] == k;
  if (identity || r <= 1) {
    std::copy(src.begin(), src.end(), dst.begin());
    return dst;
  }
  std::vector<std::size_t> src_stride(r, 1);
  for (std::size_t k = r - 1; k-- > 0;) src_stride[k] = src_stride[k + 1] * src_dims[k + 1];
  std::vector<std::size_t> dims(r), stride(r);
  for (std::size_t k = 0; k < r; ++k) {
    dims[k] = src_dims[perm[k]];
    stride[k] = src_stride[perm[k]];
  }
  const std::size_t inner = dims[r - 1];
  const std::size_t inner_stride = stride[r - 1];
  std::vector<std::size_t> pos(r - 1, 0);
  std::size_t base = 0;
  std::size_t out = 0;
  const std::size_t outer_count = src.size() / inner;
  for (std::size_t o = 0; o < outer_count; ++o) {
    const Complex* s = src.data() + base;
    Complex* d = dst.data() + out;
    for (std::size_t i = 0; i < inner; ++i) d[i] = s[i * inner_stride];
    out += inner;
    for (std::size_t k = r - 1; k-- > 0;) {
      if (++pos[k] < dims[k]) {
        base += stride[k];
        break;
      }
      base -= stride[k] * (dims[k] - 1);
      pos[k] = 0;
    }
  }
  return dst;
}

}  // namespace detail

inline DenseTensor DenseTensor::permuted(const std::vector<std::string>& order) const {
  if (order.size() != rank()) {
    throw Error(ErrorKind::DimensionMismatch, "permutation has wrong length");
  }
  std::vector<std::size_t> perm(order.size());
  std::vector<std::size_t> dims(rank());
  std::vector<Index> idx(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    perm[k] = axis(order[k]);
    idx[k] = indices_[perm[k]];
  }
  for (std::size_t k = 0; k < rank(); ++k) dims[k] = indices_[k].dim;
  return DenseTensor(std::move(idx), detail::permute_data(data_, dims, perm));
}

using IndexPair = std::pair<std::string, std::string>;

/// Contracts `a` and `b` over the listed (label in a, label in b) pairs. Free indices
/// of `a` come first in the result, then those of `b`, each in their original order.
inline DenseTensor contract(const DenseTensor& a, const DenseTensor& b, const std::vector<IndexPair>& pairs) {
  std::vector<bool> a_summed(a.rank(), false), b_summed(b.rank(), false);
  std::vector<std::string> a_order, b_order;
  std::size_t k_dim = 1;
  for (const auto& [la, lb] : pairs) {
    const std::size_t ia = a.axis(la);
    const std::size_t ib = b.axis(lb);
    if (a_summed[ia] || b_summed[ib]) {
      throw Error(ErrorKind::DuplicateIndexName, "index listed twice in contraction");
    }
    if (a.index(ia).dim != b.index(ib).dim) {
      throw Error(ErrorKind::DimensionMismatch,
                  "cannot contract '" + la + "' (" + std::to_string(a.index(ia).dim) + ") with '" + lb + "' (" +
                      std::to_string(b.index(ib).dim) + ")");
    }
    a_summed[ia] = b_summed[ib] = true;
    k_dim *= a.index(ia).dim;
  }
  std::vector<Index> out_idx;
  std::size_t m_dim = 1, n_dim = 1;
  for (std::size_t k = 0; k < a.rank(); ++k) {
    if (!a_summed[k]) {
      a_order.push_back(a.index(k).label);
      out_idx.push_back(a.index(k));
      m_dim *= a.index(k).dim;
    }
  }
  for (const auto& pr : pairs) a_order.push_back(pr.first);
  for (const auto& pr : pairs) b_order.push_back(pr.second);
  for (std::size_t k = 0; k < b.rank(); ++k) {
    if (!b_summed[k]) {
      b_order.push_back(b.index(k).label);
      out_idx.push_back(b.index(k));
      n_dim *= b.index(k).dim;
    }
  }
  // Throws DuplicateIndexName if free labels of a and b collide.
  DenseTensor out(std::move(out_idx));
  const DenseTensor ap = a.permuted(a_order);
  const DenseTensor bp = b.permuted(b_order);
  using Map = Eigen::Map<const RowMatrix>;
  Eigen::Map<RowMatrix> c(out.data().data(), static_cast<Eigen::Index>(m_dim), static_cast<Eigen::Index>(n_dim));
  c.noalias() = Map(ap.data().data(), static_cast<Eigen::Index>(m_dim), static_cast<Eigen::Index>(k_dim)) *
                Map(bp.data().data(), static_cast<Eigen::Index>(k_dim), static_cast<Eigen::Index>(n_dim));
  return out;
}

/// Sum over all entries of conj(a) * b, with indices matched by label.
inline Complex inner(const DenseTensor& a, const DenseTensor& b) {
  if (a.rank() != b.rank()) throw Error(ErrorKind::DimensionMismatch, "inner product of different ranks");
  const DenseTensor bp = b.permuted(a.labels());
  for (std::size_t k = 0; k < a.rank(); ++k) {
    if (a.index(k).dim != bp.index(k).dim) throw Error(ErrorKind::DimensionMismatch, "inner product dims");
  }
  Complex acc{0.0, 0.0};
  auto x = a.data();
  auto y = bp.data();
  for (std::size_t i = 0; i < x.size(); ++i) acc += std::conj(x[i]) * y[i];
  return acc;
}

/// Views a tensor as a matrix with the given row labels (in order) and the rest as columns.
inline Matrix to_matrix(const DenseTensor& t, const std::vector<std::string>& row_labels,
                        std::vector<std::string>* col_labels_out = nullptr) {
  std::vector<std::string> order = row_labels;
  std::size_t rows = 1;
  for (const auto& l : row_labels) rows *= t.dim(l);
  for (const auto& i : t.indices()) {
    if (std::find(row_labels.begin(), row_labels.end(), i.label) == row_labels.end()) order.push_back(i.label);
  }
  if (col_labels_out) col_labels_out->assign(order.begin() + static_cast<std::ptrdiff_t>(row_labels.size()), order.end());
  const DenseTensor p = t.permuted(order);
  const std::size_t cols = rows == 0 ? 0 : p.size() / rows;
  return Eigen::Map<const RowMatrix>(p.data().data(), static_cast<Eigen::Index>(rows),
                                     static_cast<Eigen::Index>(cols));
}

inline DenseTensor from_matrix(const Matrix& m, std::vector<Index> row_idx, const std::vector<Index>& col_idx) {
  row_idx.insert(row_idx.end(), col_idx.begin(), col_idx.end());
  DenseTensor t(std::move(row_idx));
  if (t.size() != static_cast<std::size_t>(m.size())) {
    throw Error(ErrorKind::DimensionMismatch, "matrix shape does not match indices");
  }
  Eigen::Map<RowMatrix>(t.data().data(), m.rows(), m.cols()) = m;
  return t;
}

/// Contracts matrix `m` onto index `label` of `t`: result[.., a', ..] = sum_a t[.., a, ..] m(a, a').
/// The index keeps its label and position.
inline DenseTensor absorb(const DenseTensor& t, const Matrix& m, const std::string& label) {
  const std::size_t ax = t.axis(label);
  const Index& idx = t.index(ax);
  if (static_cast<std::size_t>(m.rows()) != idx.dim) {
    throw Error(ErrorKind::DimensionMismatch, "matrix rows do not match index '" + label + "'");
  }
  const std::string tmp = label + "#in";
  DenseTensor mt = from_matrix(m, {Index{tmp, idx.dim, idx.role}},
                               {Index{label, static_cast<std::size_t>(m.cols()), idx.role}});
  DenseTensor out = contract(t, mt, {{label, tmp}});
  if (ax + 1 == t.rank()) return out;
  std::vector<std::string> order = out.labels();
  order.pop_back();
  order.insert(order.begin() + static_cast<std::ptrdiff_t>(ax), label);
  return out.permuted(order);
}

struct TruncationReport {
  double discarded_weight = 0.0;
  std::size_t kept_rank = 0;
};

struct TruncationParams {
  double cutoff = 1e-12;
  std::optional<std::size_t> chi_max;
};

/// Number of singular values kept under the relative-cutoff-then-cap rule.
inline std::size_t truncation_rank(std::span<const double> s, const TruncationParams& params) {
  double total = 0.0;
  for (double x : s) total += x * x;
  std::size_t keep = s.size();
  double tail = 0.0;
  while (keep > 1) {
    const double next = tail + s[keep - 1] * s[keep - 1];
    if (next > params.cutoff * total && s[keep - 1] > 0.0) break;
    tail = next;
    --keep;
  }
  if (params.chi_max) keep = std::min(keep, std::max<std::size_t>(*params.chi_max, 1));
  return std::max<std::size_t>(keep, 1);
}

struct SvdSplit {
  DenseTensor u;              // left indices..., bond
  std::vector<double> s;      // nonincreasing, strictly positive
  DenseTensor v;              // bond, right indices...
  TruncationReport report;
};

/// Truncated SVD of `t` with `left` as row indices. The left singular vectors are
/// gauge-fixed so their largest-magnitude entry is real positive.
inline SvdSplit svd_split(const DenseTensor& t, const std::vector<std::string>& left, const TruncationParams& params,
                          const std::string& bond_label = "bond") {
  if (left.empty() || left.size() >= t.rank()) {
    throw Error(ErrorKind::EmptyPartition, "left index set must be a nonempty proper subset");
  }
  if (!(params.cutoff >= 0.0 && params.cutoff < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "cutoff must lie in [0, 1)");
  }
  std::vector<std::string> right;
  const Matrix m = to_matrix(t, left, &right);
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw Error(ErrorKind::NumericalFailure, "SVD did not converge");
  const Eigen::VectorXd& sv = svd.singularValues();
  if (!sv.allFinite()) throw Error(ErrorKind::NumericalFailure, "non-finite singular values");

  std::vector<double> s_all(sv.data(), sv.data() + sv.size());
  if (s_all.empty() || s_all.front() <= 0.0) {
    throw Error(ErrorKind::NumericalFailure, "cannot split a zero tensor");
  }
  const std::size_t keep = truncation_rank(s_all, params);
  double total = 0.0, kept = 0.0;
  for (std::size_t k = 0; k < s_all.size(); ++k) {
    total += s_all[k] * s_all[k];
    if (k < keep) kept += s_all[k] * s_all[k];
  }

  Matrix u = svd.matrixU().leftCols(static_cast<Eigen::Index>(keep));
  Matrix vh = svd.matrixV().leftCols(static_cast<Eigen::Index>(keep)).adjoint();
  for (Eigen::Index c = 0; c < u.cols(); ++c) {
    Eigen::Index arg = 0;
    u.col(c).cwiseAbs2().maxCoeff(&arg);
    const Complex z = u(arg, c);
    const Complex phase = std::abs(z) > 0.0 ? std::conj(z) / std::abs(z) : Complex{1.0, 0.0};
    u.col(c) *= phase;
    vh.row(c) *= std::conj(phase);
  }

  std::vector<Index> left_idx, right_idx;
  for (const auto& l : left) left_idx.push_back(t.index(t.axis(l)));
  for (const auto& r : right) right_idx.push_back(t.index(t.axis(r)));
  const Index bond = virtual_index(bond_label, keep);

  SvdSplit out;
  out.u = from_matrix(u, left_idx, {bond});
  out.v = from_matrix(vh, {bond}, right_idx);
  out.s.assign(s_all.begin(), s_all.begin() + static_cast<std::ptrdiff_t>(keep));
  out.report.kept_rank = keep;
  out.report.discarded_weight = std::clamp((total - kept) / total, 0.0, 1.0);
  return out;
}

enum class RootMode { Sqrt, InvSqrt };

inline constexpr double kHermitianTol = 1e-10;

/// Square root or regularized inverse square root of a Hermitian PSD matrix. In
/// InvSqrt mode eigenvalues below reg_tol * max eigenvalue are dropped.
inline Matrix hermitian_root(const Matrix& m, RootMode mode, double reg_tol = 1e-12) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::DimensionMismatch, "hermitian_root needs a square matrix");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol * scale) {
    throw Error(ErrorKind::NotHermitian, "matrix is not Hermitian within tolerance");
  }
  const Matrix herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(herm);
  if (eig.info() != Eigen::Success) throw Error(ErrorKind::NumericalFailure, "eigensolver failed");
  Eigen::VectorXd w = eig.eigenvalues();
  if (w.size() > 0 && w.minCoeff() < -kHermitianTol * scale) {
    throw Error(ErrorKind::NegativeSpectrum, "eigenvalue below -1e-10");
  }
  w = w.cwiseMax(0.0);
  const double wmax = w.size() > 0 ? w.maxCoeff() : 0.0;
  Eigen::VectorXd f(w.size());
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    if (mode == RootMode::Sqrt) {
      f(k) = std::sqrt(w(k));
    } else {
      f(k) = (w(k) > reg_tol * wmax && w(k) > 0.0) ? 1.0 / std::sqrt(w(k)) : 0.0;
    }
  }
  const Matrix& v = eig.eigenvectors();
  return v * f.asDiagonal() * v.adjoint();
}

}  // namespace hexhadron
