#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <fftw3.h>

#include "hexhadron/confinement.hpp"
#include "hexhadron/error.hpp"
#include "hexhadron/evolve.hpp"

namespace hexhadron {

enum class Channel { MzA, MzB, MxA, MxB, MyA, MyB, S };

inline double channel_value(const TimeSeriesRow& r, Channel c) {
  switch (c) {
    case Channel::MzA: return r.mz_a;
    case Channel::MzB: return r.mz_b;
    case Channel::MxA: return r.mx_a;
    case Channel::MxB: return r.mx_b;
    case Channel::MyA: return r.my_a;
    case Channel::MyB: return r.my_b;
    case Channel::S: return r.s;
  }
  return 0.0;
}

struct Spectrum {
  std::vector<double> omega;  // omega[k] = k * d_omega, k >= 1
  std::vector<double> amp;
  double t_min = 0.0;
  double t_max = 0.0;
  std::size_t samples = 0;
  std::size_t pad_factor = 1;
  double dt = 0.0;

  double resolution() const { return 2.0 * std::numbers::pi / (t_max - t_min); }
};

struct Peak {
  double omega = 0.0;
  double amplitude = 0.0;
  std::optional<double> model_line;
  double delta = 0.0;  // |omega - model_line| when matched
};

struct PeakReport {
  std::vector<Peak> peaks;  // amplitude descending
  double resolution = 0.0;

  bool all_matched() const {
    return std::all_of(peaks.begin(), peaks.end(), [](const Peak& p) { return p.model_line.has_value(); });
  }
};

namespace detail {

inline double hann(std::size_t k, std::size_t n) {
  if (n < 2) return 1.0;
  return 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n - 1));
}

struct Window {
  std::vector<double> values;
  double dt = 0.0;
  double t_min = 0.0;
  double t_max = 0.0;
};

inline Window select_window(const std::vector<double>& t, const std::vector<double>& x, double t_min, double t_max) {
  if (t.size() != x.size()) throw Error(ErrorKind::DimensionMismatch, "time and value columns differ in length");
  if (t.size() < 2) throw Error(ErrorKind::WindowOutOfRange, "series has fewer than two samples");
  const double dt = t[1] - t[0];
  if (!(dt > 0.0)) throw Error(ErrorKind::NonUniformSampling, "time column is not increasing");
  for (std::size_t k = 1; k < t.size(); ++k) {
    if (std::abs((t[k] - t[k - 1]) - dt) > 1e-6 * dt) throw Error(ErrorKind::NonUniformSampling, "time step varies");
  }
  const double slack = 1e-9 * dt;
  if (!(t_max > t_min) || t_min < t.front() - slack || t_max > t.back() + slack) {
    throw Error(ErrorKind::WindowOutOfRange, "analysis window lies outside the series");
  }
  Window w;
  w.dt = dt;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] >= t_min - slack && t[k] <= t_max + slack) {
      if (w.values.empty()) w.t_min = t[k];
      w.t_max = t[k];
      w.values.push_back(x[k]);
    }
  }
  if (w.values.size() < 4) throw Error(ErrorKind::WindowOutOfRange, "analysis window holds fewer than four samples");
  return w;
}

}  // namespace detail

/// One-sided amplitude spectrum vs angular frequency of x(t) restricted to [t_min, t_max].
/// The window is mean-subtracted, Hann-tapered and zero-padded to pad_factor times its length.
/// Amplitudes are normalized so that a tone a*cos(w t) peaks near a.
inline Spectrum fft_spectrum(const std::vector<double>& t, const std::vector<double>& x, double t_min, double t_max,
                             std::size_t pad_factor = 4) {
  if (pad_factor < 1) throw Error(ErrorKind::InvalidArgument, "pad_factor must be at least 1");
  const detail::Window w = detail::select_window(t, x, t_min, t_max);
  const std::size_t n = w.values.size();
  const std::size_t nfft = n * pad_factor;
  double mean = 0.0;
  for (double v : w.values) mean += v;
  mean /= static_cast<double>(n);

  std::vector<double> in(nfft, 0.0);
  double wsum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double wk = detail::hann(k, n);
    wsum += wk;
    in[k] = (w.values[k] - mean) * wk;
  }
  const std::size_t nout = nfft / 2 + 1;
  std::vector<std::complex<double>> out(nout);
  fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(nfft), in.data(),
                                        reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
  if (plan == nullptr) throw Error(ErrorKind::NumericalFailure, "FFT plan creation failed");
  fftw_execute(plan);
  fftw_destroy_plan(plan);

  Spectrum s;
  s.t_min = w.t_min;
  s.t_max = w.t_max;
  s.samples = n;
  s.pad_factor = pad_factor;
  s.dt = w.dt;
  const double d_omega = 2.0 * std::numbers::pi / (static_cast<double>(nfft) * w.dt);
  for (std::size_t k = 1; k < nout; ++k) {
    s.omega.push_back(static_cast<double>(k) * d_omega);
    s.amp.push_back(2.0 * std::abs(out[k]) / wsum);
  }
  return s;
}

inline Spectrum fft_spectrum(const TimeSeries& series, Channel channel, double t_min = 10.0, double t_max = 100.0,
                             std::size_t pad_factor = 4) {
  std::vector<double> t, x;
  t.reserve(series.rows.size());
  x.reserve(series.rows.size());
  for (const auto& r : series.rows) {
    t.push_back(r.t);
    x.push_back(channel_value(r, channel));
  }
  return fft_spectrum(t, x, t_min, t_max, pad_factor);
}

/// Parseval check on the tapered window: time-domain energy and the energy recovered
/// from the full complex DFT. Returns {time_energy, spectral_energy}.
inline std::pair<double, double> parseval_energies(const std::vector<double>& t, const std::vector<double>& x,
                                                   double t_min, double t_max) {
  const detail::Window w = detail::select_window(t, x, t_min, t_max);
  const std::size_t n = w.values.size();
  double mean = 0.0;
  for (double v : w.values) mean += v;
  mean /= static_cast<double>(n);
  std::vector<double> in(n);
  double e_time = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    in[k] = (w.values[k] - mean) * detail::hann(k, n);
    e_time += in[k] * in[k];
  }
  std::vector<std::complex<double>> out(n / 2 + 1);
  fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(), reinterpret_cast<fftw_complex*>(out.data()),
                                        FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  double e_freq = 0.0;
  for (std::size_t k = 0; k < out.size(); ++k) {
    // bins other than DC and Nyquist stand for a conjugate pair
    const bool paired = k != 0 && !(n % 2 == 0 && k == n / 2);
    e_freq += (paired ? 2.0 : 1.0) * std::norm(out[k]);
  }
  return {e_time, e_freq / static_cast<double>(n)};
}

/// Local maxima at or above rel_threshold times the global maximum, refined by a parabola
/// through the three bins around each maximum.
inline PeakReport extract_peaks(const Spectrum& spec, double rel_threshold = 0.05) {
  if (!(rel_threshold > 0.0 && rel_threshold < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "rel_threshold must lie in (0, 1)");
  }
  PeakReport rep;
  rep.resolution = spec.resolution();
  const auto& a = spec.amp;
  if (a.size() < 3) return rep;
  const double gmax = *std::max_element(a.begin(), a.end());
  if (!(gmax > 0.0)) return rep;
  const double d_omega = spec.omega[1] - spec.omega[0];
  for (std::size_t k = 1; k + 1 < a.size(); ++k) {
    if (!(a[k] > a[k - 1] && a[k] >= a[k + 1]) || a[k] < rel_threshold * gmax) continue;
    const double y0 = a[k - 1], y1 = a[k], y2 = a[k + 1];
    const double denom = y0 - 2.0 * y1 + y2;
    double shift = 0.0, peak = y1;
    if (denom < 0.0) {
      shift = 0.5 * (y0 - y2) / denom;
      peak = y1 - 0.25 * (y0 - y2) * shift;
    }
    rep.peaks.push_back({spec.omega[k] + shift * d_omega, peak, std::nullopt, 0.0});
  }
  std::sort(rep.peaks.begin(), rep.peaks.end(), [](const Peak& p, const Peak& q) { return p.amplitude > q.amplitude; });
  return rep;
}

/// Annotates each peak with the nearest line among the masses and their differences, if within tol.
inline PeakReport match_masses(PeakReport report, const MassSpectrum& masses, std::optional<double> tol = std::nullopt) {
  const double tolerance = tol.value_or(report.resolution);
  if (!(tolerance > 0.0)) throw Error(ErrorKind::InvalidArgument, "match tolerance must be positive");
  const std::vector<double> lines = masses.lines();
  for (auto& p : report.peaks) {
    p.model_line.reset();
    p.delta = 0.0;
    double best = tolerance;
    for (double l : lines) {
      const double d = std::abs(p.omega - l);
      if (d <= best) {
        best = d;
        p.model_line = l;
        p.delta = d;
      }
    }
  }
  return report;
}

}  // namespace hexhadron
