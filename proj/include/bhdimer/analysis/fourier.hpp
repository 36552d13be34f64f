// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <vector>

namespace bhd::analysis {

enum class Window { None, Hann };

/// Default peak threshold relative to the tallest line.
inline constexpr double kDefaultRelHeight = 1e-4;

struct Peak {
  double frequency;
  double magnitude;
};

/// One-sided magnitude spectrum on angular frequencies k * 2 pi / (n dt).
/// Positive and negative frequency bins of a complex series are folded
/// together as sqrt(|X_k|^2 + |X_{n-k}|^2) / sqrt(n), so the squared
/// magnitudes sum to the squared norm of the (mean-subtracted) input.
struct FourierSpectrum {
  std::vector<double> frequencies;
  std::vector<double> magnitudes;
  std::vector<Peak> peaks;
  double bin_width = 0.0;
};

/// `zero_pad` >= 1 multiplies the transform length for a finer frequency grid.
FourierSpectrum fourier_spectrum(const std::vector<std::complex<double>>& series, double dt,
                                 Window window = Window::None, int zero_pad = 1);

FourierSpectrum fourier_spectrum(const std::vector<double>& series, double dt,
                                 Window window = Window::None, int zero_pad = 1);

/// Local maxima above rel_height times the global maximum, with parabolic
/// interpolation of the peak position. Sorted by frequency.
std::vector<Peak> detect_peaks(const FourierSpectrum& spec, double rel_height);

/// Largest peak, or a zero peak when the spectrum has none.
Peak dominant_peak(const FourierSpectrum& spec);

struct CombStats {
  double mean_spacing;
  double relative_std;
};

/// Statistics of consecutive frequency differences; needs at least 3 peaks.
CombStats comb_spacing(const std::vector<Peak>& peaks);

/// Decay rate from a log-linear fit of per-window oscillation amplitude
/// (max - min) of `values` over consecutive windows of length `window`.
double envelope_decay_rate(const std::vector<double>& times, const std::vector<double>& values,
                           double window);

}  // namespace bhd::analysis
