#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "hexhadron/confinement.hpp"
#include "hexhadron/evolve.hpp"
#include "hexhadron/lattice.hpp"
#include "hexhadron/statevector.hpp"

namespace hexhadron {

/// H = -J sum_<ij> sz_i sz_j + h sum_i sx_i on a finite cluster, applied matrix-free.
class SpinHamiltonian {
 public:
  static constexpr std::size_t kDenseLimit = 14;

  SpinHamiltonian(const FiniteCluster& cluster, double J, double h, std::size_t cap = kDefaultClusterCap)
      : graph_(cluster.graph), J_(J), h_(h) {
    check_cap(graph_.n_sites(), cap);
    const Eigen::Index dim = Eigen::Index{1} << graph_.n_sites();
    diag_.resize(dim);
    for (Eigen::Index c = 0; c < dim; ++c) {
      double e = 0.0;
      for (const auto& ed : graph_.edges()) {
        const bool sb = (c >> ed.b) & 1;
        const bool sa = (c >> ed.a) & 1;
        e += sb == sa ? -J_ : J_;
      }
      diag_(c) = e;
    }
  }

  std::size_t n_sites() const { return graph_.n_sites(); }
  Eigen::Index dim() const { return diag_.size(); }
  double J() const { return J_; }
  double h() const { return h_; }
  const HeavyHexGraph& graph() const { return graph_; }
  const Eigen::VectorXd& diagonal() const { return diag_; }

  void apply(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const {
    out = diag_.cast<Complex>().cwiseProduct(in);
    if (h_ == 0.0) return;
    const std::size_t n = n_sites();
    for (Eigen::Index c = 0; c < dim(); ++c) {
      Complex acc{0.0, 0.0};
      for (std::size_t s = 0; s < n; ++s) acc += in(c ^ (Eigen::Index{1} << s));
      out(c) += h_ * acc;
    }
  }

  Eigen::VectorXcd apply(const Eigen::VectorXcd& in) const {
    Eigen::VectorXcd out;
    apply(in, out);
    return out;
  }

  /// Dense real form; only for n <= kDenseLimit.
  Eigen::MatrixXd dense() const {
    if (n_sites() > kDenseLimit) throw Error(ErrorKind::SizeCapExceeded, "dense form limited to 14 spins");
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim(), dim());
    for (Eigen::Index c = 0; c < dim(); ++c) {
      m(c, c) = diag_(c);
      for (std::size_t s = 0; s < n_sites(); ++s) m(c ^ (Eigen::Index{1} << s), c) += h_;
    }
    return m;
  }

  double energy(const StateVector& psi) const { return psi.amp.dot(apply(psi.amp)).real(); }

 private:
  HeavyHexGraph graph_;
  double J_;
  double h_;
  Eigen::VectorXd diag_;
};

inline SpinHamiltonian build_hamiltonian(const FiniteCluster& cluster, double J, double h,
                                         std::size_t cap = kDefaultClusterCap) {
  return SpinHamiltonian(cluster, J, h, cap);
}

/// Full eigendecomposition of a small Hamiltonian, reusable for many times.
class SpectralPropagator {
 public:
  static constexpr std::size_t kLimit = 10;

  explicit SpectralPropagator(const SpinHamiltonian& H) {
    if (H.n_sites() > kLimit) throw Error(ErrorKind::SizeCapExceeded, "spectral propagator limited to 10 spins");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H.dense());
    if (eig.info() != Eigen::Success) throw Error(ErrorKind::NumericalFailure, "dense eigensolver failed");
    energies_ = eig.eigenvalues();
    vectors_ = eig.eigenvectors();
  }

  StateVector evolve(const StateVector& psi, double t) const {
    if (t == 0.0) return psi;
    Eigen::VectorXcd c = vectors_.transpose().cast<Complex>() * psi.amp;
    for (Eigen::Index k = 0; k < c.size(); ++k) c(k) *= std::exp(Complex{0.0, -energies_(k) * t});
    return {psi.n_sites, vectors_.cast<Complex>() * c};
  }

 private:
  Eigen::VectorXd energies_;
  Eigen::MatrixXd vectors_;
};

struct KrylovOptions {
  std::size_t subspace = 30;
  double tol = 1e-10;
};

namespace detail {

// One Lanczos step of exp(-i H tau) psi. Returns false if the error estimate exceeds tol.
inline bool lanczos_expm_step(const SpinHamiltonian& H, const Eigen::VectorXcd& psi, double tau, std::size_t m_max,
                              double tol, Eigen::VectorXcd& result) {
  const double beta0 = psi.norm();
  std::vector<Eigen::VectorXcd> v{psi / beta0};
  std::vector<double> alpha, beta;
  Eigen::VectorXcd w;
  bool breakdown = false;
  double beta_last = 0.0;
  for (std::size_t j = 0; j < m_max; ++j) {
    H.apply(v[j], w);
    const double a = v[j].dot(w).real();
    alpha.push_back(a);
    for (const auto& q : v) w -= q * q.dot(w);  // full reorthogonalization
    const double b = w.norm();
    beta_last = b;
    if (b < 1e-13 * std::max(1.0, std::abs(a))) {
      breakdown = true;
      break;
    }
    if (j + 1 < m_max) {
      beta.push_back(b);
      v.push_back(w / b);
    }
  }
  const auto m = static_cast<Eigen::Index>(alpha.size());
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index k = 0; k < m; ++k) {
    T(k, k) = alpha[static_cast<std::size_t>(k)];
    if (k + 1 < m) T(k, k + 1) = T(k + 1, k) = beta[static_cast<std::size_t>(k)];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(T);
  Eigen::VectorXcd coeff = eig.eigenvectors().row(0).transpose().cast<Complex>();
  for (Eigen::Index k = 0; k < m; ++k) coeff(k) *= std::exp(Complex{0.0, -eig.eigenvalues()(k) * tau});
  const Eigen::VectorXcd y = eig.eigenvectors().cast<Complex>() * coeff;
  if (!breakdown && beta_last * std::abs(y(m - 1)) > tol) return false;
  result = Eigen::VectorXcd::Zero(psi.size());
  for (Eigen::Index k = 0; k < m; ++k) result += v[static_cast<std::size_t>(k)] * (beta0 * y(k));
  return true;
}

}  // namespace detail

/// exp(-iHt) psi with adaptive Lanczos substeps.
inline StateVector krylov_evolve(const SpinHamiltonian& H, const StateVector& psi, double t,
                                 const KrylovOptions& opts = {}) {
  StateVector out = psi;
  double done = 0.0;
  double tau = t;
  while (std::abs(t - done) > 0.0) {
    tau = std::copysign(std::min(std::abs(tau), std::abs(t - done)), t);
    Eigen::VectorXcd next;
    std::size_t halvings = 0;
    while (!detail::lanczos_expm_step(H, out.amp, tau, opts.subspace, opts.tol, next)) {
      tau /= 2.0;
      if (++halvings > 60) throw Error(ErrorKind::NumericalFailure, "Krylov step size underflow");
    }
    out.amp = next;
    done += tau;
    if (halvings == 0) tau *= 2.0;
  }
  return out;
}

/// exp(-iHt) psi: full diagonalization for small clusters, Lanczos otherwise.
inline StateVector exact_evolve(const SpinHamiltonian& H, const StateVector& psi, double t) {
  if (t == 0.0) return psi;
  if (H.n_sites() <= SpectralPropagator::kLimit) return SpectralPropagator(H).evolve(psi, t);
  return krylov_evolve(H, psi, t);
}

inline double exact_expectation(const StateVector& psi, SiteId site, Pauli p) {
  const Eigen::Index bit = Eigen::Index{1} << site;
  Complex acc{0.0, 0.0};
  for (Eigen::Index c = 0; c < psi.amp.size(); ++c) {
    const bool down = (c & bit) != 0;
    switch (p) {
      case Pauli::Z: acc += std::norm(psi.amp(c)) * (down ? -1.0 : 1.0); break;
      case Pauli::X: acc += std::conj(psi.amp(c ^ bit)) * psi.amp(c); break;
      // sigma^y |up> = i |down>, sigma^y |down> = -i |up>
      case Pauli::Y: acc += std::conj(psi.amp(c ^ bit)) * psi.amp(c) * Complex{0.0, down ? -1.0 : 1.0}; break;
    }
  }
  return acc.real();
}

/// Connected <sz_i sz_j> - <sz_i><sz_j>.
inline double exact_correlator(const StateVector& psi, SiteId i, SiteId j) {
  double zz = 0.0;
  for (Eigen::Index c = 0; c < psi.amp.size(); ++c) {
    const double si = ((c >> i) & 1) ? -1.0 : 1.0;
    const double sj = ((c >> j) & 1) ? -1.0 : 1.0;
    zz += std::norm(psi.amp(c)) * si * sj;
  }
  return zz - exact_expectation(psi, i, Pauli::Z) * exact_expectation(psi, j, Pauli::Z);
}

/// <b_p|H|b_q> in the five-sector reference basis, |Z+> energy removed from the diagonal.
inline Eigen::Matrix<double, 5, 5> exact_projected_hamiltonian(const FiniteCluster& cluster, double J, double h,
                                                               std::size_t cap = kDefaultClusterCap) {
  const auto basis = projected_hamiltonian_reference_basis(cluster, cap);
  const SpinHamiltonian H(cluster, J, h, cap);
  const double e0 = H.diagonal()(0);
  Eigen::Matrix<double, 5, 5> out;
  for (std::size_t q = 0; q < kNumSectors; ++q) {
    const Eigen::VectorXcd hq = H.apply(basis[q].amp);
    for (std::size_t p = 0; p < kNumSectors; ++p) {
      out(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) = basis[p].amp.dot(hq).real();
    }
  }
  out.diagonal().array() -= e0;
  return out;
}

/// Applies a gate sequence (such as trotter_step_gates on the cluster graph) to a state vector.
inline void apply_gates(StateVector& psi, const std::vector<Gate>& gates) {
  const Eigen::Index dim = psi.amp.size();
  for (const auto& g : gates) {
    if (g.sites.size() == 1) {
      const Eigen::Index bit = Eigen::Index{1} << g.sites[0];
      for (Eigen::Index c = 0; c < dim; ++c) {
        if (c & bit) continue;
        const Complex u = psi.amp(c), d = psi.amp(c | bit);
        psi.amp(c) = g.matrix(0, 0) * u + g.matrix(0, 1) * d;
        psi.amp(c | bit) = g.matrix(1, 0) * u + g.matrix(1, 1) * d;
      }
    } else {
      const Eigen::Index b0 = Eigen::Index{1} << g.sites[0];
      const Eigen::Index b1 = Eigen::Index{1} << g.sites[1];
      for (Eigen::Index c = 0; c < dim; ++c) {
        if ((c & b0) || (c & b1)) continue;
        const std::array<Eigen::Index, 4> idx{c, c | b1, c | b0, c | b0 | b1};
        Eigen::Vector4cd x;
        for (int k = 0; k < 4; ++k) x(k) = psi.amp(idx[static_cast<std::size_t>(k)]);
        const Eigen::Vector4cd y = g.matrix * x;
        for (int k = 0; k < 4; ++k) psi.amp(idx[static_cast<std::size_t>(k)]) = y(k);
      }
    }
  }
}

}  // namespace hexhadron
