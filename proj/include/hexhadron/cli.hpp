#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "hexhadron/confinement.hpp"
#include "hexhadron/evolve.hpp"
#include "hexhadron/oracle_ed.hpp"
#include "hexhadron/spectroscopy.hpp"

#ifndef HEXHADRON_BUILD_ID
#define HEXHADRON_BUILD_ID "unknown"
#endif

namespace hexhadron::cli {

enum ExitCode : int { kOk = 0, kVerifyFailed = 1, kUsage = 2, kNumerical = 3 };

inline int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::ConfigError:
    case ErrorKind::InvalidArgument:
    case ErrorKind::WindowOutOfRange:
    case ErrorKind::NonUniformSampling:
    case ErrorKind::NonPositiveJ:
    case ErrorKind::IoError:
    case ErrorKind::SizeCapExceeded:
      return kUsage;
    default:
      return kNumerical;
  }
}

// ---------------------------------------------------------------- numbers and config

inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{"j",           "h",         "initial_state", "dt",
                                             "t_max",       "cutoff",    "chi_max",       "bp_tol",
                                             "bp_max_iters", "sample_every", "correlator_dmax", "out_dir"};
  return keys;
}

using KeyValues = std::map<std::string, std::string>;

/// Flat "key = value" text; '#' starts a comment. Unknown or repeated keys are errors.
inline KeyValues parse_config_text(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::ConfigError, "line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto& keys = config_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw Error(ErrorKind::ConfigError, "unknown key '" + key + "'");
    }
    if (kv.count(key)) throw Error(ErrorKind::ConfigError, "key '" + key + "' given twice");
    kv[key] = value;
  }
  return kv;
}

inline KeyValues read_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::ConfigError, "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

namespace detail {

inline double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw Error(ErrorKind::ConfigError, "key '" + key + "': '" + v + "' is not a number");
  }
}

inline std::size_t parse_count(const std::string& key, const std::string& v) {
  const double x = parse_double(key, v);
  if (!(x >= 0.0) || x != std::floor(x)) {
    throw Error(ErrorKind::ConfigError, "key '" + key + "': '" + v + "' is not a nonnegative integer");
  }
  return static_cast<std::size_t>(x);
}

}  // namespace detail

/// Applies key/value pairs on top of `cfg`. dt defaults to 0.05/J unless given.
inline QuenchConfig apply_config(const KeyValues& kv, QuenchConfig cfg = {}) {
  bool dt_given = false;
  for (const auto& [key, v] : kv) {
    if (key == "j") {
      cfg.J = detail::parse_double(key, v);
    } else if (key == "h") {
      cfg.h = detail::parse_double(key, v);
    } else if (key == "initial_state") {
      std::string s = v;
      std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
      if (s == "zplus" || s == "z+") {
        cfg.initial = InitialState::Zplus;
      } else if (s == "yplus" || s == "y+") {
        cfg.initial = InitialState::Yplus;
      } else {
        throw Error(ErrorKind::ConfigError, "key 'initial_state': expected Zplus or Yplus, got '" + v + "'");
      }
    } else if (key == "dt") {
      cfg.dt = detail::parse_double(key, v);
      dt_given = true;
    } else if (key == "t_max") {
      cfg.t_max = detail::parse_double(key, v);
    } else if (key == "cutoff") {
      cfg.cutoff = detail::parse_double(key, v);
    } else if (key == "chi_max") {
      if (v == "none" || v == "unlimited" || v.empty()) {
        cfg.chi_max.reset();
      } else {
        cfg.chi_max = detail::parse_count(key, v);
      }
    } else if (key == "bp_tol") {
      cfg.bp_tol = detail::parse_double(key, v);
    } else if (key == "bp_max_iters") {
      cfg.bp_max_iters = detail::parse_count(key, v);
    } else if (key == "sample_every") {
      cfg.sample_every = detail::parse_count(key, v);
    } else if (key == "correlator_dmax") {
      cfg.correlator_dmax = detail::parse_count(key, v);
    } else if (key == "out_dir") {
      cfg.out_dir = v;
    } else {
      throw Error(ErrorKind::ConfigError, "unknown key '" + key + "'");
    }
  }
  if (!(cfg.J > 0.0)) throw Error(ErrorKind::ConfigError, "key 'j': J must be positive");
  if (!dt_given) cfg.dt = 0.05 / cfg.J;
  cfg.validate();
  return cfg;
}

inline KeyValues config_to_kv(const QuenchConfig& c) {
  return {{"j", fmt(c.J)},
          {"h", fmt(c.h)},
          {"initial_state", c.initial == InitialState::Zplus ? "Zplus" : "Yplus"},
          {"dt", fmt(c.dt)},
          {"t_max", fmt(c.t_max)},
          {"cutoff", fmt(c.cutoff)},
          {"chi_max", c.chi_max ? std::to_string(*c.chi_max) : "none"},
          {"bp_tol", fmt(c.bp_tol)},
          {"bp_max_iters", std::to_string(c.bp_max_iters)},
          {"sample_every", std::to_string(c.sample_every)},
          {"correlator_dmax", std::to_string(c.correlator_dmax)},
          {"out_dir", c.out_dir}};
}

// ---------------------------------------------------------------- CSV

inline const std::string kTimeSeriesHeader = "t,mz_A,mz_B,mx_A,mx_B,my_A,my_B,s,chi_max,discarded_weight,bp_iters";

inline std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream f(p);
  if (!f) throw Error(ErrorKind::IoError, "cannot write '" + p.string() + "'");
  return f;
}

inline void write_timeseries_csv(const std::filesystem::path& p, const TimeSeries& ts) {
  auto f = open_out(p);
  f << kTimeSeriesHeader << '\n';
  for (const auto& r : ts.rows) {
    f << fmt(r.t) << ',' << fmt(r.mz_a) << ',' << fmt(r.mz_b) << ',' << fmt(r.mx_a) << ',' << fmt(r.mx_b) << ','
      << fmt(r.my_a) << ',' << fmt(r.my_b) << ',' << fmt(r.s) << ',' << r.chi_max << ',' << fmt(r.discarded_weight)
      << ',' << r.bp_iters << '\n';
  }
}

inline void write_correlator_csv(const std::filesystem::path& p, const TimeSeries& ts) {
  auto f = open_out(p);
  f << "t,start_sublattice,d,C\n";
  for (const auto& c : ts.correlators) {
    f << fmt(c.t) << ',' << to_char(c.start) << ',' << c.d << ',' << fmt(c.value) << '\n';
  }
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  return out;
}

/// Reads a time-series CSV back. The header must match the quench output exactly.
inline TimeSeries read_timeseries_csv(const std::filesystem::path& p) {
  std::ifstream f(p);
  if (!f) throw Error(ErrorKind::IoError, "cannot read '" + p.string() + "'");
  std::string line;
  if (!std::getline(f, line) || trim(line) != kTimeSeriesHeader) {
    throw Error(ErrorKind::ConfigError, "'" + p.string() + "' does not start with the time-series header");
  }
  TimeSeries ts;
  std::size_t lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto c = split_csv_line(line);
    if (c.size() != 11) {
      throw Error(ErrorKind::ConfigError, p.string() + ":" + std::to_string(lineno) + ": expected 11 columns");
    }
    TimeSeriesRow r;
    const auto num = [&](std::size_t k) { return detail::parse_double("column " + std::to_string(k + 1), c[k]); };
    r.t = num(0);
    r.mz_a = num(1);
    r.mz_b = num(2);
    r.mx_a = num(3);
    r.mx_b = num(4);
    r.my_a = num(5);
    r.my_b = num(6);
    r.s = num(7);
    r.chi_max = static_cast<std::size_t>(num(8));
    r.discarded_weight = num(9);
    r.bp_iters = static_cast<std::size_t>(num(10));
    if (!ts.rows.empty() && !(r.t > ts.rows.back().t)) {
      throw Error(ErrorKind::NonUniformSampling, p.string() + ":" + std::to_string(lineno) + ": t is not increasing");
    }
    ts.rows.push_back(r);
  }
  return ts;
}

inline Channel parse_channel(const std::string& name) {
  static const std::map<std::string, Channel> names{{"mz_A", Channel::MzA}, {"mz_B", Channel::MzB},
                                                    {"mx_A", Channel::MxA}, {"mx_B", Channel::MxB},
                                                    {"my_A", Channel::MyA}, {"my_B", Channel::MyB},
                                                    {"s", Channel::S}};
  const auto it = names.find(name);
  if (it == names.end()) throw Error(ErrorKind::ConfigError, "unknown channel '" + name + "'");
  return it->second;
}

inline void write_spectrum_csv(const std::filesystem::path& p, const Spectrum& s) {
  auto f = open_out(p);
  f << "omega,amp\n";
  for (std::size_t k = 0; k < s.omega.size(); ++k) f << fmt(s.omega[k]) << ',' << fmt(s.amp[k]) << '\n';
}

inline void write_peaks_csv(const std::filesystem::path& p, const PeakReport& r) {
  auto f = open_out(p);
  f << "omega_peak,amplitude,model_line,delta\n";
  for (const auto& pk : r.peaks) {
    f << fmt(pk.omega) << ',' << fmt(pk.amplitude) << ',' << (pk.model_line ? fmt(*pk.model_line) : "none") << ','
      << (pk.model_line ? fmt(pk.delta) : "nan") << '\n';
  }
}

inline void write_masses_csv(std::ostream& masses_out, std::ostream& diffs_out, const MassSpectrum& m) {
  masses_out << "index,mass\n";
  for (std::size_t i = 0; i < m.masses.size(); ++i) masses_out << i + 1 << ',' << fmt(m.masses[i]) << '\n';
  diffs_out << "i,j,abs_difference\n";
  for (const auto& d : m.differences) diffs_out << d.i + 1 << ',' << d.j + 1 << ',' << fmt(d.value) << '\n';
}

// ---------------------------------------------------------------- manifest

inline std::string iso_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct RunManifest {
  std::string command;
  KeyValues config;
  std::string started;
  std::string finished;
  std::string build_id = HEXHADRON_BUILD_ID;
  std::vector<std::string> outputs;
  std::vector<std::string> warnings;

  nlohmann::json to_json() const {
    return {{"command", command}, {"config", config},   {"started", started},  {"finished", finished},
            {"build_id", build_id}, {"outputs", outputs}, {"warnings", warnings}};
  }

  void write(const std::filesystem::path& p) const {
    auto f = open_out(p);
    f << to_json().dump(2) << '\n';
  }
};

// ---------------------------------------------------------------- commands

/// Runs one quench and writes timeseries.csv, correlators.csv (if requested) and manifest.json.
inline RunManifest cmd_quench(const QuenchConfig& cfg, std::ostream* log = nullptr) {
  RunManifest man;
  man.command = "quench";
  man.config = config_to_kv(cfg);
  man.started = iso_now();
  const std::filesystem::path dir(cfg.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create '" + dir.string() + "'");
  const TimeSeries ts = run_quench(cfg, [&](const TimeSeriesRow& r) {
    if (log) *log << "t=" << r.t << " mz_A=" << r.mz_a << " mz_B=" << r.mz_b << " s=" << r.s << " chi=" << r.chi_max
                  << '\n';
  });
  write_timeseries_csv(dir / "timeseries.csv", ts);
  man.outputs.push_back((dir / "timeseries.csv").string());
  if (cfg.correlator_dmax > 0) {
    write_correlator_csv(dir / "correlators.csv", ts);
    man.outputs.push_back((dir / "correlators.csv").string());
  }
  man.warnings = ts.warnings;
  man.finished = iso_now();
  man.write(dir / "manifest.json");
  return man;
}

struct SpectrumResult {
  Spectrum spectrum;
  PeakReport peaks;
};

inline SpectrumResult analyse_spectrum(const TimeSeries& ts, Channel channel, double t_min, double t_max, double J,
                                       double h, double threshold, std::size_t pad_factor = 4) {
  SpectrumResult r;
  r.spectrum = fft_spectrum(ts, channel, t_min, t_max, pad_factor);
  r.peaks = match_masses(extract_peaks(r.spectrum, threshold), quasiparticle_masses(J, h));
  return r;
}

// ---------------------------------------------------------------- verify

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

enum class VerifyLevel { Quick, Full };

struct VerifyOptions {
  VerifyLevel level = VerifyLevel::Quick;
  bool corrupt_coupling = false;  // replace sqrt(2) h by h in the model before comparing
};

namespace detail {

inline DenseTensor random_tensor(std::vector<Index> idx, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  DenseTensor t(std::move(idx));
  for (auto& z : t.data()) z = {n(rng), n(rng)};
  return t;
}

inline Check check_projection(const VerifyOptions& opt, const std::vector<std::pair<std::size_t, std::size_t>>& shapes) {
  double worst = 0.0;
  for (const auto& [cx, cy] : shapes) {
    const FiniteCluster cl = build_finite_cluster(cx, cy);
    for (double h : {0.1, 0.2, 0.3, 0.5}) {
      Eigen::Matrix<double, 5, 5> model = build_projected_hamiltonian(1.0, h).matrix;
      if (opt.corrupt_coupling) model(0, 2) = model(2, 0) = h;
      const auto exact = exact_projected_hamiltonian(cl, 1.0, h);
      worst = std::max(worst, (exact - model).cwiseAbs().maxCoeff());
    }
  }
  std::string sizes;
  for (const auto& [cx, cy] : shapes) sizes += (sizes.empty() ? "" : ",") + std::to_string(5 * cx * cy);
  return {"projected Hamiltonian matches exact projection (" + sizes + " sites)", worst <= 1e-12,
          "max |diff| = " + fmt(worst)};
}

inline Check check_svd(std::mt19937_64& rng) {
  const DenseTensor t = random_tensor({virtual_index("a", 3), virtual_index("b", 4), virtual_index("c", 5)}, rng);
  const SvdSplit sp = svd_split(t, {"a", "c"}, {0.0, std::nullopt});
  const DenseTensor us = absorb(sp.u, Matrix(Eigen::Map<const Eigen::VectorXd>(sp.s.data(), static_cast<Eigen::Index>(sp.s.size())).cast<Complex>().asDiagonal()), "bond");
  DenseTensor back = contract(us, sp.v, {{"bond", "bond"}});
  back = back.permuted(t.labels());
  double err = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) err = std::max(err, std::abs(back.data()[k] - t.data()[k]));
  return {"SVD reconstruction", err <= 1e-12 * std::max(1.0, t.norm()), "max |U S V - T| = " + fmt(err)};
}

inline Check check_roots(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix a(6, 6);
  for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = {n(rng), n(rng)};
  const Matrix m = a * a.adjoint() + 0.1 * Matrix::Identity(6, 6);
  const Matrix r = hermitian_root(m, RootMode::Sqrt);
  const Matrix ri = hermitian_root(m, RootMode::InvSqrt);
  const double e1 = (r * r - m).cwiseAbs().maxCoeff() / m.cwiseAbs().maxCoeff();
  const double e2 = (r * ri - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff();
  return {"Hermitian root round trips", std::max(e1, e2) <= 1e-11, "max error = " + fmt(std::max(e1, e2))};
}

inline Check check_contraction(std::mt19937_64& rng) {
  const DenseTensor a = random_tensor({virtual_index("i", 3), virtual_index("j", 4), virtual_index("k", 2)}, rng);
  const DenseTensor b = random_tensor({virtual_index("k", 2), virtual_index("l", 5), virtual_index("j", 4)}, rng);
  const DenseTensor c = contract(a, b, {{"j", "j"}, {"k", "k"}});
  double err = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t l = 0; l < 5; ++l) {
      Complex acc{0.0, 0.0};
      for (std::size_t j = 0; j < 4; ++j) {
        for (std::size_t k = 0; k < 2; ++k) acc += a.at({i, j, k}) * b.at({k, l, j});
      }
      err = std::max(err, std::abs(acc - c.at({i, l})));
    }
  }
  return {"contraction vs loop sum", err <= 1e-12, "max |diff| = " + fmt(err)};
}

inline Check check_parseval(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> t, x;
  for (int k = 0; k < 1801; ++k) {
    t.push_back(10.0 + 0.05 * k);
    x.push_back(std::cos(3.1 * t.back()) + 0.3 * n(rng));
  }
  const auto [et, ef] = parseval_energies(t, x, 10.0, 100.0);
  const double rel = std::abs(et - ef) / et;
  return {"FFT Parseval", rel <= 1e-10, "relative mismatch = " + fmt(rel)};
}

inline Check check_entropy() {
  const double s = entanglement_density({1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)});
  return {"entropy of (1/sqrt2, 1/sqrt2) is one bit", std::abs(s - 1.0) <= 1e-14, "s = " + fmt(s)};
}

inline Check check_bp_invariants(std::mt19937_64& rng) {
  const HeavyHexUnitCell cell = build_unit_cell();
  TensorNetworkState st(cell);
  for (SiteId s = 0; s < cell.n_sites(); ++s) {
    std::vector<Index> idx{physical_index(kPhysLabel)};
    for (EdgeId e : cell.incident(s)) idx.push_back(virtual_index(edge_label(e), 2));
    DenseTensor t = random_tensor(idx, rng);
    // a product-state component keeps the random network well conditioned
    t.at(std::vector<std::size_t>(t.rank(), 0)) += 4.0;
    st.set_tensor(s, std::move(t));
  }
  MessageSet msgs = init_messages(st);
  BPOptions o;
  o.check_invariants = true;
  try {
    const BPReport rep = bp_fixed_point(st, msgs, o);
    return {"BP message invariants every sweep", rep.converged,
            std::to_string(rep.iterations) + " sweeps, residual " + fmt(rep.final_residual)};
  } catch (const Error& e) {
    return {"BP message invariants every sweep", false, e.what()};
  }
}

}  // namespace detail

/// Largest |<sz>_B(BP) - <sz>_B(exact)| for tJ <= t_max on the 10-site periodic cluster.
inline double bp_vs_exact_deviation(double h, double t_max, double dt = 0.05) {
  QuenchConfig cfg;
  cfg.h = h;
  cfg.t_max = t_max;
  cfg.dt = dt;
  const TimeSeries ts = run_quench(cfg);
  const FiniteCluster cl = build_finite_cluster(2, 1);
  const SpinHamiltonian H(cl, 1.0, h);
  const SpectralPropagator U(H);
  const StateVector psi0 = StateVector::basis(cl.graph.n_sites(), 0);
  const auto b_sites = cl.graph.sites_of(Sublattice::B);
  double worst = 0.0;
  for (const auto& r : ts.rows) {
    const StateVector psi = U.evolve(psi0, r.t);
    double mz = 0.0;
    for (SiteId b : b_sites) mz += exact_expectation(psi, b, Pauli::Z);
    mz /= static_cast<double>(b_sites.size());
    worst = std::max(worst, std::abs(mz - r.mz_b));
  }
  return worst;
}

/// Error ratio err(dt=0.1) / err(dt=0.05) of <sz>_B at t against a dt=0.0125 reference.
inline double trotter_error_ratio(double h, double t) {
  auto mz_b = [&](double dt) {
    QuenchConfig cfg;
    cfg.h = h;
    cfg.t_max = t;
    cfg.dt = dt;
    cfg.sample_every = static_cast<std::size_t>(std::llround(t / dt));
    return run_quench(cfg).rows.back().mz_b;
  };
  const double ref = mz_b(0.0125);
  return std::abs(mz_b(0.1) - ref) / std::abs(mz_b(0.05) - ref);
}

inline std::vector<Check> run_verify(const VerifyOptions& opt) {
  std::mt19937_64 rng(20240601);
  std::vector<Check> out;
  out.push_back(detail::check_projection(opt, {{1, 1}, {2, 1}}));
  out.push_back(detail::check_svd(rng));
  out.push_back(detail::check_roots(rng));
  out.push_back(detail::check_contraction(rng));
  out.push_back(detail::check_parseval(rng));
  out.push_back(detail::check_entropy());
  out.push_back(detail::check_bp_invariants(rng));
  if (opt.level == VerifyLevel::Full) {
    out.push_back(detail::check_projection(opt, {{3, 1}, {2, 2}}));
    const double dev = bp_vs_exact_deviation(0.2, 2.0);
    out.push_back({"BP vs exact <sz>_B on 10 sites, h=0.2, tJ<=2", dev <= 5e-3, "max |diff| = " + fmt(dev)});
    const double ratio = trotter_error_ratio(0.3, 1.0);
    out.push_back({"second-order Trotter error ratio at h=0.3, tJ=1", ratio >= 3.2 && ratio <= 4.8,
                   "ratio = " + fmt(ratio)});
  }
  return out;
}

inline void print_report(std::ostream& os, const std::vector<Check>& checks) {
  std::size_t width = 0;
  for (const auto& c : checks) width = std::max(width, c.name.size());
  for (const auto& c : checks) {
    os << (c.passed ? "PASS  " : "FAIL  ") << std::left << std::setw(static_cast<int>(width)) << c.name << "  "
       << c.detail << '\n';
  }
}

// ---------------------------------------------------------------- sweep

/// Worker cap from HEXHADRON_THREADS, else the hardware concurrency.
inline std::size_t worker_cap() {
  if (const char* env = std::getenv("HEXHADRON_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return static_cast<std::size_t>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

struct SweepResult {
  std::string out_dir;
  int exit_code = kOk;
  std::string message;
};

/// Runs independent quenches concurrently, each in its own output directory.
inline std::vector<SweepResult> run_sweep(const std::vector<QuenchConfig>& configs, std::size_t workers) {
  std::vector<SweepResult> results(configs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (std::size_t k = next++; k < configs.size(); k = next++) {
      results[k].out_dir = configs[k].out_dir;
      try {
        cmd_quench(configs[k]);
      } catch (const Error& e) {
        results[k].exit_code = exit_code_for(e.kind());
        results[k].message = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, configs.size()); ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  return results;
}

}  // namespace hexhadron::cli
