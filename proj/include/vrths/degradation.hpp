#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "vrths/errors.hpp"
#include "vrths/rng.hpp"

namespace vrths {

// Power-law stiffening of a rubber isolator under accelerated humidity
// exposure: k(T) = k0 * (1 + A0 * T^m), with T in days.
struct DegradationModel {
  double k0 = 4.60e4;   // N/m, stiffness at nominal (undegraded) conditions
  double A0 = 3.39e-5;  // day^-m, material degradation coefficient
  double m = 2.37;      // time-dependence exponent

  void validate() const {
    if (!(k0 > 0.0)) throw ConfigError("degradation: k0 must be > 0");
    if (!(A0 >= 0.0)) throw ConfigError("degradation: A0 must be >= 0");
    if (!(m > 0.0)) throw ConfigError("degradation: m must be > 0");
  }
};

inline double stiffness_at(const DegradationModel& deg, double days) {
  if (days < 0.0) throw NumericError("stiffness_at: exposure time must be >= 0");
  if (days == 0.0) return deg.k0;
  return deg.k0 * (1.0 + deg.A0 * std::pow(days, deg.m));
}

// One stiffness observation from an exposure test: fractional increase
// (k(T) - k0) / k0 after T days.
struct DegObservation {
  double days = 0.0;
  double frac_increase = 0.0;
};

struct PowerLawFit {
  double A0 = 0.0;
  double m = 0.0;
};

// Calibrates (A0, m) by linear least squares in log space:
// ln(frac) = ln(A0) + m ln(T). Exact for two observations.
inline PowerLawFit fit_power_law(std::span<const DegObservation> obs) {
  if (obs.size() < 2)
    throw NumericError("fit_power_law: need at least 2 observations");
  std::vector<double> x, y;
  x.reserve(obs.size());
  y.reserve(obs.size());
  for (const auto& o : obs) {
    if (!(o.days > 0.0))
      throw NumericError("fit_power_law: exposure times must be > 0");
    if (!(o.frac_increase > 0.0))
      throw NumericError("fit_power_law: fractional increases must be > 0");
    x.push_back(std::log(o.days));
    y.push_back(std::log(o.frac_increase));
  }
  for (std::size_t i = 0; i < obs.size(); ++i)
    for (std::size_t j = i + 1; j < obs.size(); ++j)
      if (obs[i].days == obs[j].days)
        throw NumericError("fit_power_law: duplicate exposure time");

  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(y.size());
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double m = sxy / sxx;
  return PowerLawFit{std::exp(my - m * mx), m};
}

// Lognormal specimen-to-specimen variation of the degradation parameters,
// mean pinned at the nominal values.
struct SpecimenSampler {
  DegradationModel nominal{};
  double cov_k0 = 0.10;
  double cov_A0 = 0.05;
  double cov_m = 0.05;
  std::uint64_t seed = 0;

  void validate() const {
    nominal.validate();
    if (cov_k0 < 0.0 || cov_A0 < 0.0 || cov_m < 0.0)
      throw ConfigError("specimen sampler: coefficients of variation must be >= 0");
  }
};

// Deterministic per (seed, draw_index): each specimen gets its own substream,
// so enlarging a campaign never changes earlier specimens.
inline DegradationModel sample_specimen(const SpecimenSampler& s,
                                        std::uint64_t draw_index) {
  auto rng = RandomStream::substream(s.seed, draw_index);
  DegradationModel d = s.nominal;
  d.k0 = rng.lognormal_mean_cov(s.nominal.k0, s.cov_k0);
  d.A0 = rng.lognormal_mean_cov(s.nominal.A0, s.cov_A0);
  d.m = rng.lognormal_mean_cov(s.nominal.m, s.cov_m);
  return d;
}

}  // namespace vrths
