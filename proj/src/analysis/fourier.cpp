// SPDX-License-Identifier: Apache-2.0
#include "bhdimer/analysis/fourier.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace bhd::analysis {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// Forward DFT of length n via FFTW; planning is serialised.
std::vector<std::complex<double>> dft(std::vector<std::complex<double>> in) {
  const int n = static_cast<int>(in.size());
  std::vector<std::complex<double>> out(in.size());
  auto* pin = reinterpret_cast<fftw_complex*>(in.data());
  auto* pout = reinterpret_cast<fftw_complex*>(out.data());
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_1d(n, pin, pout, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  if (!plan) throw std::runtime_error("FFTW planning failed");
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

}  // namespace

FourierSpectrum fourier_spectrum(const std::vector<std::complex<double>>& series, double dt, Window window,
                                 int zero_pad) {
  const std::size_t n = series.size();
  if (n < 64) throw std::invalid_argument("fourier_spectrum needs at least 64 samples");
  if (!(dt > 0.0)) throw std::invalid_argument("sample spacing must be > 0");
  if (zero_pad < 1) throw std::invalid_argument("zero_pad must be >= 1");

  std::complex<double> mean{};
  for (const auto& v : series) mean += v;
  mean /= static_cast<double>(n);

  const std::size_t m = n * static_cast<std::size_t>(zero_pad);
  std::vector<std::complex<double>> buf(m);
  for (std::size_t i = 0; i < n; ++i) {
    double w = 1.0;
    if (window == Window::Hann) w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
    buf[i] = w * (series[i] - mean);
  }
  const auto x = dft(std::move(buf));

  FourierSpectrum spec;
  const std::size_t half = m / 2;
  spec.bin_width = 2.0 * std::numbers::pi / (static_cast<double>(m) * dt);
  spec.frequencies.resize(half + 1);
  spec.magnitudes.resize(half + 1);
  const double norm = 1.0 / std::sqrt(static_cast<double>(m));
  for (std::size_t k = 0; k <= half; ++k) {
    double p = std::norm(x[k]);
    if (k != 0 && !(m % 2 == 0 && k == half)) p += std::norm(x[m - k]);
    spec.frequencies[k] = spec.bin_width * static_cast<double>(k);
    spec.magnitudes[k] = std::sqrt(p) * norm;
  }
  return spec;
}

FourierSpectrum fourier_spectrum(const std::vector<double>& series, double dt, Window window, int zero_pad) {
  std::vector<std::complex<double>> c(series.begin(), series.end());
  return fourier_spectrum(c, dt, window, zero_pad);
}

std::vector<Peak> detect_peaks(const FourierSpectrum& spec, double rel_height) {
  if (!(rel_height > 0.0 && rel_height < 1.0)) throw std::invalid_argument("rel_height must lie in (0, 1)");
  const auto& m = spec.magnitudes;
  std::vector<Peak> peaks;
  if (m.size() < 3) return peaks;
  const double top = *std::max_element(m.begin(), m.end());
  if (!(top > 0.0)) return peaks;
  const double threshold = rel_height * top;
  for (std::size_t k = 1; k + 1 < m.size(); ++k) {
    if (!(m[k] > m[k - 1] && m[k] >= m[k + 1] && m[k] > threshold)) continue;
    const double den = m[k - 1] - 2.0 * m[k] + m[k + 1];
    double shift = den != 0.0 ? 0.5 * (m[k - 1] - m[k + 1]) / den : 0.0;
    shift = std::clamp(shift, -0.5, 0.5);
    const double height = m[k] - 0.25 * (m[k - 1] - m[k + 1]) * shift;
    peaks.push_back({spec.frequencies[k] + shift * spec.bin_width, height});
  }
  return peaks;
}

Peak dominant_peak(const FourierSpectrum& spec) {
  Peak best{0.0, 0.0};
  for (const auto& p : spec.peaks.empty() ? detect_peaks(spec, 0.5) : spec.peaks)
    if (p.magnitude > best.magnitude) best = p;
  return best;
}

CombStats comb_spacing(const std::vector<Peak>& peaks) {
  if (peaks.size() < 3) throw std::invalid_argument("comb_spacing needs at least 3 peaks");
  std::vector<double> f;
  f.reserve(peaks.size());
  for (const auto& p : peaks) f.push_back(p.frequency);
  std::sort(f.begin(), f.end());
  std::vector<double> d(f.size() - 1);
  for (std::size_t i = 0; i + 1 < f.size(); ++i) d[i] = f[i + 1] - f[i];
  double mean = 0.0;
  for (double v : d) mean += v;
  mean /= static_cast<double>(d.size());
  double var = 0.0;
  for (double v : d) var += (v - mean) * (v - mean);
  var /= static_cast<double>(d.size());
  return {mean, mean != 0.0 ? std::sqrt(var) / std::abs(mean) : 0.0};
}

double envelope_decay_rate(const std::vector<double>& times, const std::vector<double>& values, double window) {
  if (times.size() != values.size() || times.size() < 2) throw std::invalid_argument("bad series");
  if (!(window > 0.0)) throw std::invalid_argument("window must be > 0");
  std::vector<double> xs, ys;
  const double t0 = times.front();
  std::size_t i = 0;
  while (i < times.size()) {
    const double lo = t0 + std::floor((times[i] - t0) / window) * window;
    const double hi = lo + window;
    double mn = values[i], mx = values[i];
    std::size_t j = i;
    while (j < times.size() && times[j] < hi) {
      mn = std::min(mn, values[j]);
      mx = std::max(mx, values[j]);
      ++j;
    }
    if (times[j - 1] - lo > 0.9 * window && mx > mn) {
      xs.push_back(lo + 0.5 * window);
      ys.push_back(std::log(mx - mn));
    }
    i = j;
  }
  if (xs.size() < 2) throw std::invalid_argument("too few complete windows for an envelope fit");
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sx += xs[k];
    sy += ys[k];
    sxx += xs[k] * xs[k];
    sxy += xs[k] * ys[k];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return -slope;
}

}  // namespace bhd::analysis
