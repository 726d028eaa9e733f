#pragma once

#include <cstdint>

#include "vrths/errors.hpp"
#include "vrths/rng.hpp"

namespace vrths {

// The load cell in the transfer system reads the total horizontal force,
// which includes the moving plate's inertia on top of the specimen's
// restoring force.
struct LoadCellModel {
  double plate_mass = 50.0;  // kg
  double noise_std = 0.0;    // N, zero-mean Gaussian per sample
  std::uint64_t seed = 0;

  void validate() const {
    if (!(plate_mass >= 0.0)) throw ConfigError("load cell: plate mass must be >= 0");
    if (!(noise_std >= 0.0)) throw ConfigError("load cell: noise std must be >= 0");
  }
};

inline double load_cell_reading(const LoadCellModel& lc, double restoring_force,
                                double plate_accel, RandomStream& noise) {
  double f = restoring_force + lc.plate_mass * plate_accel;
  if (lc.noise_std > 0.0) f += noise.normal(0.0, lc.noise_std);
  return f;
}

// Noise-free overload.
inline double load_cell_reading(const LoadCellModel& lc, double restoring_force,
                                double plate_accel) {
  return restoring_force + lc.plate_mass * plate_accel;
}

// Inertia compensation: strips the plate's share from the measured force
// using an acceleration estimate of the plate.
inline double estimate_restoring_force(const LoadCellModel& lc, double f_measured,
                                       double plate_accel_estimate) {
  return f_measured - lc.plate_mass * plate_accel_estimate;
}

}  // namespace vrths
