#pragma once

#include <cmath>
#include <numbers>
#include <span>

#include "vrths/errors.hpp"

namespace vrths {

// Displacement tracking loop: PI feedback on e = x_b - x_m plus a lead-lag
// feedforward on the commanded displacement,
//   H_ff(s) = k_ff * (1 + s/ff_zero) / (1 + s/ff_pole),
// discretized by the bilinear transform at sample_dt. The integral term is
// clamped to +/- integral_limit (the actuator stroke) as anti-windup.
struct ControllerConfig {
  double kp = 1.2;        // dimensionless
  double ki = 60.0;       // 1/s
  double k_ff = 1.0;      // dimensionless
  double ff_zero = 2.0 * std::numbers::pi * 4.5;   // rad/s
  double ff_pole = 2.0 * std::numbers::pi * 40.0;  // rad/s
  double sample_dt = 1.0 / 1024.0;
  double integral_limit = 0.5;  // m

  void validate() const {
    if (!(kp >= 0.0 && ki >= 0.0)) throw ConfigError("controller: kp, ki must be >= 0");
    if (!(ff_pole > 0.0)) throw ConfigError("controller: feedforward pole must be > 0");
    if (!(ff_zero > 0.0)) throw ConfigError("controller: feedforward zero must be > 0");
    if (!(sample_dt > 0.0)) throw ConfigError("controller: sample_dt must be > 0");
    if (!(integral_limit > 0.0)) throw ConfigError("controller: integral_limit must be > 0");
  }
};

class TrackingController {
 public:
  explicit TrackingController(const ControllerConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    // Bilinear transform of (1 + s/z)/(1 + s/p) with K = 2/dt:
    //   y[k] = (b0 u[k] + b1 u[k-1] - a1 y[k-1]) / a0
    const double K = 2.0 / cfg_.sample_dt;
    b0_ = 1.0 + K / cfg_.ff_zero;
    b1_ = 1.0 - K / cfg_.ff_zero;
    a0_ = 1.0 + K / cfg_.ff_pole;
    a1_ = 1.0 - K / cfg_.ff_pole;
  }

  // One controller sample: target is the commanded x_b, measured the realized
  // x_m. Integrator state persists across calls.
  double step(double target, double measured) {
    if (!std::isfinite(target) || !std::isfinite(measured))
      throw InstabilityError("controller: non-finite input signal");
    const double e = target - measured;
    integral_ += 0.5 * cfg_.sample_dt * (e + prev_error_);
    prev_error_ = e;
    if (cfg_.ki > 0.0) {
      const double cap = cfg_.integral_limit / cfg_.ki;
      if (integral_ > cap) integral_ = cap;
      if (integral_ < -cap) integral_ = -cap;
    }

    const double ff_in = cfg_.k_ff * target;
    const double ff_out = (b0_ * ff_in + b1_ * ff_prev_in_ - a1_ * ff_prev_out_) / a0_;
    ff_prev_in_ = ff_in;
    ff_prev_out_ = ff_out;

    return cfg_.kp * e + cfg_.ki * integral_ + ff_out;
  }

  void reset() {
    integral_ = prev_error_ = ff_prev_in_ = ff_prev_out_ = 0.0;
  }

  const ControllerConfig& config() const { return cfg_; }

 private:
  ControllerConfig cfg_;
  double b0_ = 0.0, b1_ = 0.0, a0_ = 1.0, a1_ = 0.0;
  double integral_ = 0.0;
  double prev_error_ = 0.0;
  double ff_prev_in_ = 0.0;
  double ff_prev_out_ = 0.0;
};

struct TrackingReport {
  double nrms_error_pct = 0.0;
  double peak_error = 0.0;      // m
  double peak_error_pct = 0.0;  // % of peak |x_b|
};

// 100 * sqrt(sum (x_b - x_m)^2 / sum x_b^2).
inline double nrms_tracking_error(std::span<const double> commanded,
                                  std::span<const double> measured) {
  if (commanded.size() != measured.size())
    throw NumericError("tracking error: series lengths differ");
  double se = 0.0, sr = 0.0;
  for (std::size_t i = 0; i < commanded.size(); ++i) {
    const double e = commanded[i] - measured[i];
    se += e * e;
    sr += commanded[i] * commanded[i];
  }
  if (!(sr > 0.0))
    throw NumericError("tracking error: reference series has zero energy");
  return 100.0 * std::sqrt(se / sr);
}

inline TrackingReport tracking_report(std::span<const double> commanded,
                                      std::span<const double> measured) {
  TrackingReport rep;
  rep.nrms_error_pct = nrms_tracking_error(commanded, measured);
  double peak_ref = 0.0;
  for (std::size_t i = 0; i < commanded.size(); ++i) {
    rep.peak_error = std::max(rep.peak_error, std::abs(commanded[i] - measured[i]));
    peak_ref = std::max(peak_ref, std::abs(commanded[i]));
  }
  rep.peak_error_pct = peak_ref > 0.0 ? 100.0 * rep.peak_error / peak_ref : 0.0;
  return rep;
}

}  // namespace vrths
