#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "hexhadron/error.hpp"

namespace hexhadron {

/// 2^n amplitudes over a finite cluster. Bit s of a basis index set means spin s is down.
struct StateVector {
  std::size_t n_sites = 0;
  Eigen::VectorXcd amp;

  static StateVector basis(std::size_t n, std::uint64_t config) {
    StateVector v{n, Eigen::VectorXcd::Zero(Eigen::Index{1} << n)};
    v.amp(static_cast<Eigen::Index>(config)) = 1.0;
    return v;
  }

  /// Same single-site state on every spin.
  static StateVector product(std::size_t n, const Eigen::Vector2cd& local) {
    StateVector v{n, Eigen::VectorXcd::Ones(Eigen::Index{1} << n)};
    for (Eigen::Index c = 0; c < v.amp.size(); ++c) {
      for (std::size_t s = 0; s < n; ++s) v.amp(c) *= local(((c >> s) & 1) ? 1 : 0);
    }
    return v;
  }

  double norm() const { return amp.norm(); }
};

inline void check_cap(std::size_t n, std::size_t cap) {
  if (n > cap) {
    throw Error(ErrorKind::SizeCapExceeded, std::to_string(n) + " spins exceeds the oracle cap of " + std::to_string(cap));
  }
}

}  // namespace hexhadron
