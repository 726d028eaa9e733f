#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "vrths/errors.hpp"

namespace vrths {

// One-sided power spectral density estimate, density scaling (unit^2/Hz).
struct PsdEstimate {
  std::vector<double> freq_hz;
  std::vector<double> power;
};

// Welch-averaged periodogram: periodic Hann window, mean-detrended segments,
// fixed overlap fraction.
inline PsdEstimate welch_psd(std::span<const double> x, double fs, int nperseg,
                             double overlap = 0.5) {
  if (nperseg < 8) throw NumericError("welch: window shorter than 8 samples");
  if (static_cast<int>(x.size()) < nperseg)
    throw NumericError("welch: series shorter than one window");
  if (!(overlap >= 0.0 && overlap < 1.0))
    throw NumericError("welch: overlap must lie in [0, 1)");

  const int step = std::max(1, static_cast<int>(nperseg * (1.0 - overlap)));
  std::vector<double> window(static_cast<std::size_t>(nperseg));
  double norm = 0.0;
  for (int i = 0; i < nperseg; ++i) {
    window[static_cast<std::size_t>(i)] =
        0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * i / nperseg));
    norm += window[static_cast<std::size_t>(i)] * window[static_cast<std::size_t>(i)];
  }

  Eigen::FFT<double> fft;
  const int nbins = nperseg / 2 + 1;
  std::vector<double> accum(static_cast<std::size_t>(nbins), 0.0);
  std::vector<double> seg(static_cast<std::size_t>(nperseg));
  std::vector<std::complex<double>> spec;
  int segments = 0;
  for (int start = 0; start + nperseg <= static_cast<int>(x.size()); start += step) {
    double mean = 0.0;
    for (int i = 0; i < nperseg; ++i) mean += x[static_cast<std::size_t>(start + i)];
    mean /= nperseg;
    for (int i = 0; i < nperseg; ++i)
      seg[static_cast<std::size_t>(i)] =
          (x[static_cast<std::size_t>(start + i)] - mean) * window[static_cast<std::size_t>(i)];
    fft.fwd(spec, seg);
    for (int j = 0; j < nbins; ++j)
      accum[static_cast<std::size_t>(j)] += std::norm(spec[static_cast<std::size_t>(j)]);
    ++segments;
  }

  PsdEstimate psd;
  psd.freq_hz.resize(static_cast<std::size_t>(nbins));
  psd.power.resize(static_cast<std::size_t>(nbins));
  for (int j = 0; j < nbins; ++j) {
    psd.freq_hz[static_cast<std::size_t>(j)] = fs * j / nperseg;
    double scale = 1.0 / (segments * fs * norm);
    if (j != 0 && !(nperseg % 2 == 0 && j == nbins - 1)) scale *= 2.0;  // one-sided
    psd.power[static_cast<std::size_t>(j)] = accum[static_cast<std::size_t>(j)] * scale;
  }
  return psd;
}

// Frequency (Hz) of the largest PSD bin above `min_hz`.
inline double psd_peak_frequency(const PsdEstimate& psd, double min_hz = 0.0) {
  double best = 0.0, best_f = 0.0;
  for (std::size_t j = 0; j < psd.freq_hz.size(); ++j) {
    if (psd.freq_hz[j] < min_hz) continue;
    if (psd.power[j] > best) {
      best = psd.power[j];
      best_f = psd.freq_hz[j];
    }
  }
  return best_f;
}

}  // namespace vrths
