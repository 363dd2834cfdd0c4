#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hexhadron/bp.hpp"
#include "hexhadron/observables.hpp"

namespace hexhadron {

enum class InitialState { Zplus, Yplus };

/// Bond-dimension-1 product state: all spins up, or all along +y.
inline TensorNetworkState initial_state(InitialState kind) {
  const HeavyHexUnitCell cell;
  Eigen::Vector2cd v;
  if (kind == InitialState::Zplus) {
    v << 1.0, 0.0;
  } else {
    v << 1.0 / std::sqrt(2.0), Complex{0.0, 1.0 / std::sqrt(2.0)};
  }
  return TensorNetworkState::product(std::vector<Eigen::Vector2cd>(cell.n_sites(), v), cell);
}

/// A one- or two-site unitary. Two-site matrices act on (sites[0], sites[1]) with
/// sites[0] as the slower-varying factor.
struct Gate {
  std::vector<SiteId> sites;
  std::optional<EdgeId> edge;
  Matrix matrix;
};

inline Matrix zz_gate(double J, double tau) {
  // exp(+i J tau sz sz)
  const Complex plus = std::exp(Complex{0.0, J * tau});
  const Complex minus = std::exp(Complex{0.0, -J * tau});
  Matrix g = Matrix::Zero(4, 4);
  g(0, 0) = plus;
  g(1, 1) = minus;
  g(2, 2) = minus;
  g(3, 3) = plus;
  return g;
}

inline Matrix x_gate(double h, double tau) {
  // exp(-i h tau sx)
  Matrix g(2, 2);
  g << std::cos(h * tau), Complex{0.0, -std::sin(h * tau)}, Complex{0.0, -std::sin(h * tau)}, std::cos(h * tau);
  return g;
}

/// One symmetric second-order step of exp(-iHt) for H = -J sum sz sz + h sum sx:
/// ZZ half-layer over edges in order, X layer over all sites, ZZ half-layer in reverse.
inline std::vector<Gate> trotter_step_gates(const HeavyHexGraph& g, double J, double h, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "dt must be positive");
  std::vector<Gate> out;
  const Matrix zz = zz_gate(J, dt / 2.0);
  const Matrix x = x_gate(h, dt);
  for (EdgeId e = 0; e < g.n_edges(); ++e) out.push_back({{g.edge(e).b, g.edge(e).a}, e, zz});
  for (SiteId s = 0; s < g.n_sites(); ++s) out.push_back({{s}, std::nullopt, x});
  for (EdgeId e = g.n_edges(); e-- > 0;) out.push_back({{g.edge(e).b, g.edge(e).a}, e, zz});
  return out;
}

inline std::vector<Gate> trotter_step_gates(double J, double h, double dt) {
  return trotter_step_gates(build_unit_cell(), J, h, dt);
}

inline bool is_unitary(const Matrix& g, double tol = 1e-12) {
  return g.rows() == g.cols() && (g.adjoint() * g - Matrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff() <= tol;
}

inline void apply_single_site(TensorNetworkState& state, SiteId site, const Matrix& gate) {
  if (gate.rows() != 2 || !is_unitary(gate)) throw Error(ErrorKind::NonUnitaryGate, "single-site gate is not unitary");
  state.set_tensor(site, absorb(state.tensor(site), gate.transpose(), kPhysLabel));
}

/// Two-site gate on edge e through the message-dressed simple update. `gate` acts on
/// (B endpoint, A endpoint). The tensors of both endpoints are replaced in place and the
/// two messages on e are reset to the normalized singular values of the split, which is
/// where BP would put them given the other incoming messages.
inline TruncationReport apply_two_site_simple_update(TensorNetworkState& state, MessageSet& msgs, EdgeId e,
                                                     const Matrix& gate, const TruncationParams& params,
                                                     double reg_tol = 1e-12) {
  if (gate.rows() != 4 || !is_unitary(gate)) throw Error(ErrorKind::NonUnitaryGate, "two-site gate is not unitary");
  const auto& g = state.cell();
  const SiteId vb = g.edge(e).b;
  const SiteId va = g.edge(e).a;
  const std::string l = edge_label(e);
  if (msgs.size() != 2 * g.n_edges()) throw Error(ErrorKind::StaleMessages, "message set does not match the cell");

  struct Dressed {
    DenseTensor t;
    std::vector<std::pair<EdgeId, Matrix>> inv_roots;
  };
  auto dress = [&](SiteId v) {
    Dressed d{state.tensor(v), {}};
    for (EdgeId o : edges_except(g, v, e)) {
      const Matrix& m = msgs.incoming(g, o, v);
      if (static_cast<std::size_t>(m.rows()) != state.bond_dim(o)) {
        throw Error(ErrorKind::StaleMessages, "message on " + edge_label(o) + " has the wrong dimension");
      }
      d.t = absorb(d.t, hermitian_root(m, RootMode::Sqrt), edge_label(o));
      d.inv_roots.emplace_back(o, hermitian_root(m, RootMode::InvSqrt, reg_tol));
    }
    return d;
  };
  Dressed db = dress(vb);
  Dressed da = dress(va);
  db.t.relabel(kPhysLabel, "pl");
  da.t.relabel(kPhysLabel, "pr");

  // Split each dressed tensor as Q R across (non-gate edges | physical, gate edge) when that
  // shrinks it, so that only the small cores enter the gate and the SVD.
  struct Reduced {
    std::optional<Matrix> q;     // isometry, rows over the non-gate edges
    std::vector<Index> outer;    // the non-gate edge indices
    DenseTensor core;
  };
  auto reduce = [&](const Dressed& d, const std::string& r_label) {
    Reduced red;
    std::vector<std::string> outer_labels;
    for (const auto& [o, root] : d.inv_roots) {
      outer_labels.push_back(edge_label(o));
      red.outer.push_back(d.t.index(d.t.axis(edge_label(o))));
    }
    const std::size_t rows = DenseTensor::volume(red.outer);
    const std::size_t cols = 2 * d.t.dim(l);
    if (rows <= cols) {
      red.core = d.t;
      return red;
    }
    std::vector<std::string> rest;
    const Matrix x = to_matrix(d.t, outer_labels, &rest);
    Eigen::HouseholderQR<Matrix> qr(x);
    const auto k = static_cast<Eigen::Index>(cols);
    red.q = qr.householderQ() * Matrix::Identity(x.rows(), k);
    const Matrix r = qr.matrixQR().topRows(k).template triangularView<Eigen::Upper>();
    std::vector<Index> col_idx;
    for (const auto& c : rest) col_idx.push_back(d.t.index(d.t.axis(c)));
    red.core = from_matrix(r, {virtual_index(r_label, cols)}, col_idx);
    return red;
  };
  const Reduced rb = reduce(db, "rb");
  const Reduced ra = reduce(da, "ra");

  const DenseTensor theta = contract(rb.core, ra.core, {{l, l}});
  const double region_norm = theta.norm();
  if (!(region_norm > 0.0) || !std::isfinite(region_norm)) {
    throw Error(ErrorKind::StaleMessages, "two-site environment norm is not positive");
  }
  const DenseTensor gt = from_matrix(gate, {physical_index("pl'"), physical_index("pr'")},
                                     {physical_index("pl"), physical_index("pr")});
  const DenseTensor gtheta = contract(gt, theta, {{"pl", "pl"}, {"pr", "pr"}});

  std::vector<std::string> left{"pl'"};
  if (rb.q) {
    left.push_back("rb");
  } else {
    for (const auto& i : rb.outer) left.push_back(i.label);
  }
  SvdSplit split = svd_split(gtheta, left, params, l);

  // Expand a reduced factor back over the non-gate edges.
  auto expand = [&](const Reduced& red, const DenseTensor& f, const std::string& r_label) {
    if (!red.q) return f;
    std::vector<std::string> rest;
    const Matrix fm = to_matrix(f, {r_label}, &rest);
    std::vector<Index> col_idx;
    for (const auto& c : rest) col_idx.push_back(f.index(f.axis(c)));
    return from_matrix(*red.q * fm, red.outer, col_idx);
  };

  Eigen::VectorXd s = Eigen::Map<const Eigen::VectorXd>(split.s.data(), static_cast<Eigen::Index>(split.s.size()));
  const Matrix sqrt_s = s.cwiseSqrt().cast<Complex>().asDiagonal();
  DenseTensor tb = expand(rb, absorb(split.u, sqrt_s, l), "rb");
  DenseTensor ta = expand(ra, absorb(split.v, sqrt_s, l), "ra");
  for (const auto& [o, r] : db.inv_roots) tb = absorb(tb, r, edge_label(o));
  for (const auto& [o, r] : da.inv_roots) ta = absorb(ta, r, edge_label(o));
  tb.relabel("pl'", kPhysLabel);
  ta.relabel("pr'", kPhysLabel);
  if (!tb.all_finite() || !ta.all_finite()) throw Error(ErrorKind::NumericalFailure, "non-finite tensor after update");
  state.set_pair(e, std::move(tb), std::move(ta));

  const Matrix bond = (s / s.sum()).cast<Complex>().asDiagonal();
  msgs[2 * e] = bond;
  msgs[2 * e + 1] = bond;
  return split.report;
}

struct QuenchConfig {
  double J = 1.0;
  double h = 0.0;
  InitialState initial = InitialState::Zplus;
  double dt = 0.05;
  double t_max = 0.0;
  double cutoff = 1e-12;
  std::optional<std::size_t> chi_max;
  double bp_tol = 1e-12;
  std::size_t bp_max_iters = 1000;
  std::size_t sample_every = 1;
  std::size_t correlator_dmax = 0;
  std::string out_dir = ".";

  void validate() const {
    if (!(dt > 0.0)) throw Error(ErrorKind::ConfigError, "dt must be positive");
    if (!(t_max >= 0.0)) throw Error(ErrorKind::ConfigError, "t_max must be nonnegative");
    if (!(cutoff >= 0.0 && cutoff < 1.0)) throw Error(ErrorKind::ConfigError, "cutoff must lie in [0, 1)");
    if (chi_max && *chi_max < 1) throw Error(ErrorKind::ConfigError, "chi_max must be at least 1");
    if (!(bp_tol > 0.0)) throw Error(ErrorKind::ConfigError, "bp_tol must be positive");
    if (bp_max_iters < 1) throw Error(ErrorKind::ConfigError, "bp_max_iters must be at least 1");
    if (sample_every < 1) throw Error(ErrorKind::ConfigError, "sample_every must be at least 1");
    if (!std::isfinite(J) || !std::isfinite(h)) throw Error(ErrorKind::ConfigError, "J and h must be finite");
  }
};

struct TimeSeriesRow {
  double t = 0.0;
  double mz_a = 0.0, mz_b = 0.0;
  double mx_a = 0.0, mx_b = 0.0;
  double my_a = 0.0, my_b = 0.0;
  double s = 0.0;
  std::size_t chi_max = 1;
  double discarded_weight = 0.0;  // cumulative
  std::size_t bp_iters = 0;       // sweeps since the previous row
};

struct CorrelatorRow {
  double t = 0.0;
  Sublattice start = Sublattice::A;
  std::size_t d = 0;
  double value = 0.0;
};

struct TimeSeries {
  std::vector<TimeSeriesRow> rows;
  std::vector<CorrelatorRow> correlators;
  std::vector<std::string> warnings;
  std::size_t bp_nonconverged = 0;
};

struct SublatticeAverages {
  double mx_a = 0, my_a = 0, mz_a = 0, mx_b = 0, my_b = 0, mz_b = 0;
};

inline SublatticeAverages sublattice_magnetizations(const TensorNetworkState& state, const MessageSet& msgs) {
  const auto& g = state.cell();
  SublatticeAverages avg;
  const auto as = g.sites_of(Sublattice::A);
  const auto bs = g.sites_of(Sublattice::B);
  for (SiteId s : as) {
    const auto v = site_expectations(state, msgs, s);
    avg.mx_a += v[0] / static_cast<double>(as.size());
    avg.my_a += v[1] / static_cast<double>(as.size());
    avg.mz_a += v[2] / static_cast<double>(as.size());
  }
  for (SiteId s : bs) {
    const auto v = site_expectations(state, msgs, s);
    avg.mx_b += v[0] / static_cast<double>(bs.size());
    avg.my_b += v[1] / static_cast<double>(bs.size());
    avg.mz_b += v[2] / static_cast<double>(bs.size());
  }
  return avg;
}

/// Mean per-bond Vidal entropy over the cell's edges.
inline double mean_entanglement_density(const TensorNetworkState& state, const MessageSet& msgs) {
  const auto spectra = vidal_bond_spectra(state, msgs);
  double s = 0.0;
  for (const auto& sp : spectra) s += entanglement_density(sp);
  return s / static_cast<double>(spectra.size());
}

/// Runs the quench from a given unit-cell state. `on_row` (optional) sees each row as it is recorded.
inline TimeSeries run_quench(const QuenchConfig& cfg, TensorNetworkState state,
                             const std::function<void(const TimeSeriesRow&)>& on_row = {}) {
  cfg.validate();
  TimeSeries series;
  const auto n_steps = static_cast<std::size_t>(std::floor(cfg.t_max / cfg.dt + 1e-9));
  if (std::abs(static_cast<double>(n_steps) * cfg.dt - cfg.t_max) > 1e-9 * std::max(1.0, cfg.t_max)) {
    series.warnings.push_back("t_max rounded down to " + std::to_string(static_cast<double>(n_steps) * cfg.dt));
  }
  const TruncationParams trunc{cfg.cutoff, cfg.chi_max};
  const BPOptions bp_opts{cfg.bp_tol, cfg.bp_max_iters, BPSchedule::Synchronous, false};
  const auto& g = state.cell();
  const Matrix zz = zz_gate(cfg.J, cfg.dt / 2.0);
  const Matrix x = x_gate(cfg.h, cfg.dt);

  MessageSet msgs = init_messages(state);
  std::size_t consecutive_failures = 0;
  std::size_t sweeps = 0;
  double discarded = 0.0;
  double t_now = 0.0;
  auto converge = [&]() {
    const BPReport rep = bp_fixed_point(state, msgs, bp_opts);
    sweeps += rep.iterations;
    if (rep.converged) {
      consecutive_failures = 0;
      return;
    }
    ++series.bp_nonconverged;
    if (++consecutive_failures >= 2) {
      throw Error(ErrorKind::NumericalFailure, "BP failed to converge twice in a row at t=" + std::to_string(t_now) +
                                                   " (residual " + std::to_string(rep.final_residual) + ")");
    }
  };
  auto record = [&](double t) {
    TimeSeriesRow row;
    row.t = t;
    const auto m = sublattice_magnetizations(state, msgs);
    row.mx_a = m.mx_a;
    row.my_a = m.my_a;
    row.mz_a = m.mz_a;
    row.mx_b = m.mx_b;
    row.my_b = m.my_b;
    row.mz_b = m.mz_b;
    row.s = mean_entanglement_density(state, msgs);
    row.chi_max = state.max_bond_dim();
    row.discarded_weight = discarded;
    row.bp_iters = sweeps;
    sweeps = 0;
    series.rows.push_back(row);
    for (std::size_t d = 1; d <= cfg.correlator_dmax; ++d) {
      for (Sublattice start : {Sublattice::A, Sublattice::B}) {
        series.correlators.push_back({t, start, d, two_point_correlator(state, msgs, start, d).value});
      }
    }
    if (on_row) on_row(row);
  };

  converge();
  record(0.0);
  for (std::size_t step = 1; step <= n_steps; ++step) {
    // Messages are already converged for the current state from the end of the last step.
    for (EdgeId e = 0; e < g.n_edges(); ++e) {
      discarded += apply_two_site_simple_update(state, msgs, e, zz, trunc).discarded_weight;
    }
    // Single-site unitaries leave every message unchanged.
    for (SiteId s = 0; s < g.n_sites(); ++s) apply_single_site(state, s, x);
    converge();
    for (EdgeId e = g.n_edges(); e-- > 0;) {
      discarded += apply_two_site_simple_update(state, msgs, e, zz, trunc).discarded_weight;
    }
    t_now = static_cast<double>(step) * cfg.dt;
    converge();
    if (step % cfg.sample_every == 0) record(t_now);
  }
  if (series.bp_nonconverged > 0) {
    series.warnings.push_back(std::to_string(series.bp_nonconverged) + " BP calls did not reach tolerance");
  }
  return series;
}

inline TimeSeries run_quench(const QuenchConfig& cfg, const std::function<void(const TimeSeriesRow&)>& on_row = {}) {
  return run_quench(cfg, initial_state(cfg.initial), on_row);
}

}  // namespace hexhadron
