#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "hexhadron/spectroscopy.hpp"

using namespace hexhadron;

namespace {

struct Series {
  std::vector<double> t, x;
};

template <class F>
Series sample(F f, double dt = 0.05, double t_end = 100.0) {
  Series s;
  const auto n = static_cast<std::size_t>(std::llround(t_end / dt));
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) * dt;
    s.t.push_back(t);
    s.x.push_back(f(t));
  }
  return s;
}

double resolution() { return 2.0 * std::numbers::pi / 90.0; }

template <class F>
void expect_error(F f, ErrorKind kind) {
  try {
    f();
    FAIL() << "expected " << to_string(kind);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), kind);
  }
}

}  // namespace

TEST(Spectrum, PureTone) {
  const Series s = sample([](double t) { return std::cos(3.0 * t); });
  const Spectrum spec = fft_spectrum(s.t, s.x, 10.0, 100.0);
  EXPECT_EQ(spec.samples, 1801u);
  EXPECT_EQ(spec.pad_factor, 4u);
  EXPECT_NEAR(spec.resolution(), resolution(), 1e-12);
  const PeakReport rep = extract_peaks(spec);
  ASSERT_EQ(rep.peaks.size(), 1u);
  EXPECT_NEAR(rep.peaks[0].omega, 3.0, resolution());
  EXPECT_NEAR(rep.peaks[0].amplitude, 1.0, 0.02);
}

TEST(Spectrum, AxisIsUniformAndExcludesZero) {
  const Series s = sample([](double t) { return std::sin(1.3 * t); });
  const Spectrum spec = fft_spectrum(s.t, s.x, 10.0, 100.0);
  const double d = spec.omega[0];
  EXPECT_GT(d, 0.0);
  for (std::size_t k = 1; k < spec.omega.size(); ++k) EXPECT_NEAR(spec.omega[k] - spec.omega[k - 1], d, 1e-12);
  EXPECT_NEAR(spec.omega.back(), std::numbers::pi / 0.05, d);
  for (double a : spec.amp) EXPECT_TRUE(std::isfinite(a) && a >= 0.0);
}

TEST(Spectrum, ConstantIsZero) {
  const Series s = sample([](double) { return 0.7; });
  const Spectrum spec = fft_spectrum(s.t, s.x, 10.0, 100.0);
  for (double a : spec.amp) EXPECT_NEAR(a, 0.0, 1e-13);
  EXPECT_TRUE(extract_peaks(spec).peaks.empty());
}

TEST(Spectrum, TwoEqualTones) {
  const Series s = sample([](double t) { return std::cos(4.0 * t) + std::cos(6.0 * t + 0.4); });
  const PeakReport rep = extract_peaks(fft_spectrum(s.t, s.x, 10.0, 100.0));
  ASSERT_EQ(rep.peaks.size(), 2u);
  EXPECT_NEAR(rep.peaks[0].amplitude / rep.peaks[1].amplitude, 1.0, 0.05);
  std::vector<double> w{rep.peaks[0].omega, rep.peaks[1].omega};
  std::sort(w.begin(), w.end());
  EXPECT_NEAR(w[0], 4.0, resolution());
  EXPECT_NEAR(w[1], 6.0, resolution());
}

TEST(Spectrum, CloseTonesResolved) {
  // separated by a little more than three resolution widths
  const double w1 = 2.0, w2 = 2.0 + 3.2 * resolution();
  const Series s = sample([&](double t) { return std::cos(w1 * t) + 0.8 * std::cos(w2 * t); });
  const PeakReport rep = extract_peaks(fft_spectrum(s.t, s.x, 10.0, 100.0));
  ASSERT_EQ(rep.peaks.size(), 2u);
  EXPECT_NEAR(rep.peaks[0].omega, w1, 0.5 * resolution());
  EXPECT_NEAR(rep.peaks[1].omega, w2, 0.5 * resolution());
}

TEST(Spectrum, NoisyTone) {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> noise(0.0, 0.01);
  const double w = 5.1234;
  const Series s = sample([&](double t) { return std::cos(w * t) + noise(rng); });
  const PeakReport rep = extract_peaks(fft_spectrum(s.t, s.x, 10.0, 100.0));
  ASSERT_EQ(rep.peaks.size(), 1u);
  EXPECT_NEAR(rep.peaks[0].omega, w, 0.5 * resolution());
}

TEST(Spectrum, RandomFrequencyRecovery) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> freq(0.5, 8.0), phase(0.0, 2.0 * std::numbers::pi);
  for (int trial = 0; trial < 20; ++trial) {
    const double w = freq(rng), p = phase(rng);
    const Series s = sample([&](double t) { return 0.3 * std::cos(w * t + p); });
    const PeakReport rep = extract_peaks(fft_spectrum(s.t, s.x, 10.0, 100.0));
    ASSERT_FALSE(rep.peaks.empty());
    EXPECT_NEAR(rep.peaks[0].omega, w, 0.5 * resolution()) << "w=" << w;
  }
}

TEST(Spectrum, PaddingDoesNotMovePeak) {
  const Series s = sample([](double t) { return std::cos(2.7 * t); });
  for (std::size_t pad : {1u, 2u, 4u, 8u}) {
    const PeakReport rep = extract_peaks(fft_spectrum(s.t, s.x, 10.0, 100.0, pad));
    ASSERT_FALSE(rep.peaks.empty());
    EXPECT_NEAR(rep.peaks[0].omega, 2.7, 0.5 * resolution()) << "pad " << pad;
  }
}

TEST(Spectrum, Parseval) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 1.0);
  const Series s = sample([&](double t) { return std::cos(1.1 * t) + 0.5 * n(rng); });
  for (auto [lo, hi] : std::vector<std::pair<double, double>>{{10.0, 100.0}, {10.0, 99.95}, {0.0, 37.0}}) {
    const auto [et, ef] = parseval_energies(s.t, s.x, lo, hi);
    EXPECT_NEAR(ef / et, 1.0, 1e-10);
  }
}

TEST(Spectrum, FromTimeSeriesChannel) {
  TimeSeries ts;
  for (int k = 0; k <= 2000; ++k) {
    TimeSeriesRow r;
    r.t = 0.05 * k;
    r.mz_b = std::cos(4.5 * r.t);
    r.mz_a = 1.0;
    ts.rows.push_back(r);
  }
  const PeakReport rep = extract_peaks(fft_spectrum(ts, Channel::MzB));
  ASSERT_EQ(rep.peaks.size(), 1u);
  EXPECT_NEAR(rep.peaks[0].omega, 4.5, 0.5 * resolution());
  EXPECT_TRUE(extract_peaks(fft_spectrum(ts, Channel::MzA)).peaks.empty());
}

TEST(Spectrum, Errors) {
  const Series s = sample([](double t) { return std::cos(t); }, 0.05, 20.0);
  expect_error([&] { fft_spectrum(s.t, s.x, 10.0, 100.0); }, ErrorKind::WindowOutOfRange);
  expect_error([&] { fft_spectrum(s.t, s.x, 15.0, 12.0); }, ErrorKind::WindowOutOfRange);
  Series bad = s;
  bad.t[7] += 0.01;
  expect_error([&] { fft_spectrum(bad.t, bad.x, 1.0, 10.0); }, ErrorKind::NonUniformSampling);
  Series short_x = s;
  short_x.x.pop_back();
  expect_error([&] { fft_spectrum(short_x.t, short_x.x, 1.0, 10.0); }, ErrorKind::DimensionMismatch);
  expect_error([&] { fft_spectrum(s.t, s.x, 1.0, 10.0, 0); }, ErrorKind::InvalidArgument);
  const Spectrum ok = fft_spectrum(s.t, s.x, 1.0, 10.0);
  expect_error([&] { extract_peaks(ok, 0.0); }, ErrorKind::InvalidArgument);
  expect_error([&] { extract_peaks(ok, 1.0); }, ErrorKind::InvalidArgument);
}

TEST(Matching, ExactLines) {
  const MassSpectrum m = quasiparticle_masses(1.0, 0.2);
  PeakReport rep;
  rep.resolution = resolution();
  for (double l : {m.masses[0], m.masses[3], m.differences[2].value}) rep.peaks.push_back({l, 1.0, std::nullopt, 0.0});
  const PeakReport got = match_masses(rep, m);
  EXPECT_TRUE(got.all_matched());
  for (const auto& p : got.peaks) {
    EXPECT_DOUBLE_EQ(*p.model_line, p.omega);
    EXPECT_EQ(p.delta, 0.0);
  }
}

TEST(Matching, NearestAndUnmatched) {
  const MassSpectrum m = quasiparticle_masses(1.0, 0.2);
  PeakReport rep;
  rep.resolution = resolution();
  rep.peaks.push_back({m.masses[0] + 0.01, 1.0, std::nullopt, 0.0});
  rep.peaks.push_back({3.0, 0.5, std::nullopt, 0.0});  // far from every line
  const PeakReport got = match_masses(rep, m);
  ASSERT_TRUE(got.peaks[0].model_line);
  EXPECT_DOUBLE_EQ(*got.peaks[0].model_line, m.masses[0]);
  EXPECT_NEAR(got.peaks[0].delta, 0.01, 1e-12);
  EXPECT_FALSE(got.peaks[1].model_line);
  EXPECT_FALSE(got.all_matched());
  // a wider tolerance picks up the stray peak
  EXPECT_TRUE(match_masses(rep, m, 1.0).all_matched());
  EXPECT_THROW(match_masses(rep, m, 0.0), Error);
}

TEST(Matching, EmptyReport) {
  PeakReport rep;
  rep.resolution = resolution();
  EXPECT_TRUE(match_masses(rep, quasiparticle_masses(1.0, 0.1)).peaks.empty());
}

TEST(Matching, DegenerateLines) {
  // at h = 0 four masses coincide; a peak there matches that value whichever copy wins
  const MassSpectrum m = quasiparticle_masses(1.0, 0.0);
  PeakReport rep;
  rep.resolution = resolution();
  rep.peaks.push_back({6.0, 1.0, std::nullopt, 0.0});
  rep.peaks.push_back({2.0, 1.0, std::nullopt, 0.0});
  rep.peaks.push_back({0.0 + 1e-3, 1.0, std::nullopt, 0.0});
  const PeakReport got = match_masses(rep, m);
  EXPECT_NEAR(*got.peaks[0].model_line, 6.0, 1e-13);
  EXPECT_NEAR(*got.peaks[1].model_line, 2.0, 1e-13);
  EXPECT_NEAR(*got.peaks[2].model_line, 0.0, 1e-13);
}
