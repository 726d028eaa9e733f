#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "vrths/errors.hpp"
#include "vrths/rng.hpp"

namespace vrths {

// Uniformly sampled ground acceleration history.
struct GroundMotion {
  double dt = 1.0 / 1024.0;  // s
  std::vector<double> samples;  // m/s^2
  std::string label;

  double duration() const {
    return samples.empty() ? 0.0 : dt * static_cast<double>(samples.size() - 1);
  }

  double peak() const {
    double p = 0.0;
    for (double a : samples) p = std::max(p, std::abs(a));
    return p;
  }

  void validate() const {
    if (!(dt > 0.0)) throw ConfigError("ground motion: dt must be > 0");
    if (samples.empty()) throw ConfigError("ground motion: empty sample series");
    for (double a : samples)
      if (!std::isfinite(a))
        throw ConfigError("ground motion: non-finite acceleration sample");
  }
};

// Linear interpolation onto a new uniform grid covering the same duration;
// endpoints are preserved when the grids line up.
inline GroundMotion resample_motion(const GroundMotion& motion, double target_dt) {
  motion.validate();
  if (!(target_dt > 0.0)) throw ConfigError("resample: target dt must be > 0");
  if (std::abs(target_dt - motion.dt) <= 1e-12 * motion.dt) return motion;

  GroundMotion out;
  out.dt = target_dt;
  out.label = motion.label;
  const double duration = motion.duration();
  const auto count = static_cast<std::size_t>(std::floor(duration / target_dt + 1e-9)) + 1;
  out.samples.resize(count);
  const std::size_t last = motion.samples.size() - 1;
  for (std::size_t i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) * target_dt;
    const double pos = t / motion.dt;
    const auto j = static_cast<std::size_t>(std::min(pos, static_cast<double>(last)));
    if (j >= last) {
      out.samples[i] = motion.samples[last];
    } else {
      const double w = pos - static_cast<double>(j);
      out.samples[i] = (1.0 - w) * motion.samples[j] + w * motion.samples[j + 1];
    }
  }
  return out;
}

struct TrapezoidalEnvelope {
  double rise = 4.0;     // s
  double plateau = 16.0; // s
  double decay = 10.0;   // s

  double at(double t) const {
    if (t < 0.0) return 0.0;
    if (rise > 0.0 && t < rise) return t / rise;
    const double t1 = rise + plateau;
    if (t < t1) return 1.0;
    if (decay > 0.0 && t < t1 + decay) return 1.0 - (t - t1) / decay;
    return 0.0;
  }
};

// Kanai-Tajimi synthesis spec. S0 is the two-sided spectral intensity of the
// driving white noise (m^2/s^3, over omega in rad/s):
//   S(w) = S0 * (1 + 4 zg^2 r^2) / ((1 - r^2)^2 + 4 zg^2 r^2),  r = w/wg.
struct KanaiTajimiSpec {
  double S0 = 1.0e-3;
  double omega_g = 2.0 * std::numbers::pi * 2.5;  // rad/s
  double zeta_g = 0.35;
  double duration = 30.0;  // s
  double dt = 1.0 / 1024.0;
  TrapezoidalEnvelope envelope{};
  std::uint64_t seed = 0;

  void validate() const {
    if (!(S0 >= 0.0)) throw ConfigError("motion spec: S0 must be >= 0");
    if (!(omega_g > 0.0)) throw ConfigError("motion spec: omega_g must be > 0");
    if (!(zeta_g > 0.0 && zeta_g < 1.0))
      throw ConfigError("motion spec: zeta_g must lie in (0, 1)");
    if (!(duration > 0.0)) throw ConfigError("motion spec: duration must be > 0");
    if (!(dt > 0.0)) throw ConfigError("motion spec: dt must be > 0");
  }

  double spectrum(double omega) const {
    const double r2 = (omega / omega_g) * (omega / omega_g);
    const double z2 = 4.0 * zeta_g * zeta_g * r2;
    return S0 * (1.0 + z2) / ((1.0 - r2) * (1.0 - r2) + z2);
  }
};

// Random-phase spectral synthesis of a filtered-white-noise record, amplitude
// modulated by the trapezoidal envelope and detrended to zero mean.
// Deterministic per seed.
inline GroundMotion generate_kanai_tajimi(const KanaiTajimiSpec& spec) {
  spec.validate();
  const auto n = static_cast<std::size_t>(std::llround(spec.duration / spec.dt)) + 1;

  std::size_t m = 1;
  while (m < n) m <<= 1;

  GroundMotion motion;
  motion.dt = spec.dt;
  motion.label = "kanai-tajimi seed=" + std::to_string(spec.seed);
  motion.samples.assign(n, 0.0);
  if (spec.S0 == 0.0) return motion;

  // Positive-frequency amplitudes carry the full two-sided variance:
  // A_j = sqrt(4 S(w_j) dw).
  const double dw = 2.0 * std::numbers::pi / (static_cast<double>(m) * spec.dt);
  RandomStream rng(spec.seed);
  std::vector<std::complex<double>> spectrum(m, {0.0, 0.0});
  for (std::size_t j = 1; j < m / 2; ++j) {
    const double w = dw * static_cast<double>(j);
    const double amp = std::sqrt(4.0 * spec.spectrum(w) * dw);
    const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const std::complex<double> c =
        0.5 * static_cast<double>(m) * amp * std::exp(std::complex<double>(0.0, phase));
    spectrum[j] = c;
    spectrum[m - j] = std::conj(c);
  }

  Eigen::FFT<double> fft;
  std::vector<double> stationary;
  fft.inv(stationary, spectrum);

  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * spec.dt;
    motion.samples[i] = stationary[i] * spec.envelope.at(t);
    mean += motion.samples[i];
  }
  mean /= static_cast<double>(n);
  for (double& a : motion.samples) a -= mean;
  return motion;
}

}  // namespace vrths
