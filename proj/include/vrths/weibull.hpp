#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "vrths/errors.hpp"
#include "vrths/rng.hpp"

namespace vrths {

// Two-parameter Weibull fit of uncensored time-to-failure data.
struct WeibullFit {
  double shape = 0.0;  // dimensionless
  double scale = 0.0;  // days
  double log_likelihood = 0.0;
  double ks_p_value = std::numeric_limits<double>::quiet_NaN();
};

inline double weibull_cdf(double shape, double scale, double t) {
  if (t <= 0.0) return 0.0;
  return -std::expm1(-std::pow(t / scale, shape));
}

namespace detail {

// Profile-likelihood score in the shape parameter:
//   g(k) = sum t^k ln t / sum t^k - 1/k - mean(ln t),
// strictly increasing in k. Samples are normalized by their maximum so t^k
// stays bounded for large k.
struct WeibullScore {
  std::vector<double> u;    // t / t_max
  std::vector<double> lnt;  // ln t
  double mean_lnt = 0.0;
  double t_max = 0.0;

  explicit WeibullScore(std::span<const double> t) {
    t_max = *std::max_element(t.begin(), t.end());
    u.reserve(t.size());
    lnt.reserve(t.size());
    for (double v : t) {
      u.push_back(v / t_max);
      lnt.push_back(std::log(v));
      mean_lnt += lnt.back();
    }
    mean_lnt /= static_cast<double>(t.size());
  }

  double operator()(double k) const {
    double s0 = 0.0, s1 = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double w = std::pow(u[i], k);
      s0 += w;
      s1 += w * lnt[i];
    }
    return s1 / s0 - 1.0 / k - mean_lnt;
  }
};

}  // namespace detail

// Maximum-likelihood fit on uncensored samples: the shape comes from a
// bracketed root of the profile-likelihood equation (relative tolerance
// 1e-12), the scale in closed form given the shape. Needs at least 3
// samples that are not all equal; censored data is rejected by the callers
// that know about censoring.
inline WeibullFit weibull_mle(std::span<const double> samples) {
  if (samples.size() < 3)
    throw NumericError("weibull fit: need at least 3 uncensored samples");
  for (double t : samples)
    if (!(t > 0.0) || !std::isfinite(t))
      throw NumericError("weibull fit: samples must be finite and > 0");
  const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
  if (*mn == *mx)
    throw NumericError("weibull fit: degenerate data (all samples equal)");

  const detail::WeibullScore g(samples);

  double hi = 1.0;
  while (g(hi) < 0.0) {
    hi *= 2.0;
    if (hi > 1e9) throw NumericError("weibull fit: shape solve failed to bracket");
  }
  double lo = hi * 0.5;
  while (g(lo) > 0.0) {
    lo *= 0.5;
    if (lo < 1e-12) throw NumericError("weibull fit: shape solve failed to bracket");
  }
  for (int it = 0; it < 200 && (hi - lo) > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  const double shape = 0.5 * (lo + hi);

  double s0 = 0.0;
  for (double v : g.u) s0 += std::pow(v, shape);
  const double scale =
      g.t_max * std::pow(s0 / static_cast<double>(samples.size()), 1.0 / shape);

  const auto nd = static_cast<double>(samples.size());
  double loglik = nd * (std::log(shape) - shape * std::log(scale));
  for (std::size_t i = 0; i < samples.size(); ++i)
    loglik += (shape - 1.0) * g.lnt[i] - std::pow(samples[i] / scale, shape);

  WeibullFit fit;
  fit.shape = shape;
  fit.scale = scale;
  fit.log_likelihood = loglik;
  return fit;
}

// Kolmogorov-Smirnov distance between the empirical CDF and the fitted one.
inline double ks_statistic(std::span<const double> samples, double shape,
                           double scale) {
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = weibull_cdf(shape, scale, sorted[i]);
    d = std::max(d, (static_cast<double>(i) + 1.0) / n - f);
    d = std::max(d, f - static_cast<double>(i) / n);
  }
  return d;
}

// Parametric-bootstrap p-value of the KS statistic: each replicate is drawn
// from the fitted model and refitted, which accounts for the estimated
// parameters. Deterministic per seed.
inline double goodness_of_fit(std::span<const double> samples, const WeibullFit& fit,
                              int replicates = 2000, std::uint64_t seed = 20240901) {
  if (!(fit.shape > 0.0 && fit.scale > 0.0))
    throw NumericError("goodness of fit: degenerate fit");
  if (replicates < 1) throw NumericError("goodness of fit: replicates must be >= 1");
  const double d_obs = ks_statistic(samples, fit.shape, fit.scale);

  RandomStream rng(seed);
  std::vector<double> replicate(samples.size());
  int exceed = 0;
  for (int b = 0; b < replicates; ++b) {
    for (double& v : replicate) v = rng.weibull(fit.shape, fit.scale);
    const WeibullFit refit = weibull_mle(replicate);
    if (ks_statistic(replicate, refit.shape, refit.scale) >= d_obs) ++exceed;
  }
  return (1.0 + exceed) / (1.0 + replicates);
}

inline double mttf(double shape, double scale) {
  if (!(shape > 0.0 && scale > 0.0)) throw NumericError("mttf: invalid parameters");
  return scale * std::tgamma(1.0 + 1.0 / shape);
}

inline double mttf(const WeibullFit& fit) { return mttf(fit.shape, fit.scale); }

struct FragilityCurve {
  std::vector<double> days;
  std::vector<double> probability;
};

// Fitted CDF evaluated on an increasing exposure grid.
inline FragilityCurve fragility_curve(const WeibullFit& fit,
                                      std::span<const double> grid) {
  if (!(fit.shape > 0.0 && fit.scale > 0.0))
    throw NumericError("fragility: invalid fit");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw NumericError("fragility: grid must be strictly increasing");
  FragilityCurve out;
  out.days.assign(grid.begin(), grid.end());
  out.probability.reserve(grid.size());
  for (double t : grid)
    out.probability.push_back(weibull_cdf(fit.shape, fit.scale, t));
  return out;
}

}  // namespace vrths
