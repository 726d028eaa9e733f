#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "vrths/building.hpp"
#include "vrths/engine.hpp"
#include "vrths/errors.hpp"
#include "vrths/spectral.hpp"

namespace vrths {

// Required-performance limits; a metric fails only when it strictly exceeds
// its threshold.
struct Thresholds {
  double max_drift_pct = 0.80;
  double max_top_accel_g = 2.0;
  double max_base_shear = 6.5e4;        // N
  double max_displacement = 0.14;       // m
  double max_base_displacement = 0.35;  // m

  void validate() const {
    if (!(max_drift_pct > 0.0 && max_top_accel_g > 0.0 && max_base_shear > 0.0 &&
          max_displacement > 0.0 && max_base_displacement > 0.0))
      throw ConfigError("thresholds: all limits must be > 0");
  }
};

inline const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names = {
      "drift", "top_accel", "base_shear", "max_displacement",
      "max_base_displacement"};
  return names;
}

struct MetricsReport {
  double drift_pct = 0.0;
  double top_accel_g = 0.0;
  double base_shear = 0.0;            // N
  double max_displacement = 0.0;      // m, over all DOFs, ground-relative
  double max_base_displacement = 0.0; // m, realized plate displacement
  std::vector<std::string> violated;
};

// Peak response metrics of one run. Drift pairs successive DOFs starting at
// the base; base shear is the peak estimated isolator force.
inline MetricsReport compute_metrics(const SimulationRecord& rec,
                                     const BuildingModel& model) {
  if (rec.size() == 0) throw NumericError("metrics: empty record");
  if (rec.rel_disp.empty() || rec.abs_accel.empty() ||
      rec.force_estimate.size() != rec.size() || rec.measured.size() != rec.size())
    throw NumericError("metrics: record is missing channels");
  for (const auto& ch : rec.rel_disp)
    if (ch.size() != rec.size()) throw NumericError("metrics: ragged record");

  MetricsReport m;
  const std::size_t ndof = rec.rel_disp.size();
  for (std::size_t i = 0; i < rec.size(); ++i) {
    for (std::size_t d = 0; d < ndof; ++d) {
      m.max_displacement = std::max(m.max_displacement, std::abs(rec.rel_disp[d][i]));
      if (d > 0)
        m.drift_pct = std::max(
            m.drift_pct, std::abs(rec.rel_disp[d][i] - rec.rel_disp[d - 1][i]));
    }
    m.top_accel_g = std::max(m.top_accel_g, std::abs(rec.abs_accel[ndof - 1][i]));
    m.base_shear = std::max(m.base_shear, std::abs(rec.force_estimate[i]));
    m.max_base_displacement =
        std::max(m.max_base_displacement, std::abs(rec.measured[i]));
  }
  m.drift_pct = 100.0 * m.drift_pct / model.story_height;
  m.top_accel_g /= 9.81;
  return m;
}

inline std::vector<std::string> check_failure(const MetricsReport& m,
                                              const Thresholds& t) {
  t.validate();
  std::vector<std::string> violated;
  if (m.drift_pct > t.max_drift_pct) violated.push_back("drift");
  if (m.top_accel_g > t.max_top_accel_g) violated.push_back("top_accel");
  if (m.base_shear > t.max_base_shear) violated.push_back("base_shear");
  if (m.max_displacement > t.max_displacement) violated.push_back("max_displacement");
  if (m.max_base_displacement > t.max_base_displacement)
    violated.push_back("max_base_displacement");
  return violated;
}

// Peak transmitted acceleration of the first story over the peak ground
// acceleration.
inline double transmissibility_scalar(const SimulationRecord& rec) {
  if (rec.abs_accel.size() < 2)
    throw NumericError("transmissibility: record has no first-story channel");
  double peak_story = 0.0, peak_ground = 0.0;
  for (std::size_t i = 0; i < rec.size(); ++i) {
    peak_story = std::max(peak_story, std::abs(rec.abs_accel[1][i]));
    peak_ground = std::max(peak_ground, std::abs(rec.ground_accel[i]));
  }
  if (!(peak_ground > 0.0))
    throw NumericError("transmissibility: ground motion has zero peak");
  return peak_story / peak_ground;
}

struct TransmissibilityCurve {
  std::vector<double> freq_hz;
  std::vector<double> ratio;
  std::vector<double> ground_psd;  // companion series, (m/s^2)^2 / Hz
  std::string smoothing;
};

// Frequency-domain transmissibility sqrt(PSD_story1 / PSD_ground) on a
// Welch-averaged grid; the DC bin is dropped.
inline TransmissibilityCurve transmissibility_curve(const SimulationRecord& rec,
                                                    int nperseg) {
  if (rec.abs_accel.size() < 2)
    throw NumericError("transmissibility: record has no first-story channel");
  if (rec.size() < 2 * static_cast<std::size_t>(nperseg))
    throw NumericError("transmissibility: record shorter than two windows");
  const double fs = 1.0 / rec.dt;
  const PsdEstimate story = welch_psd(rec.abs_accel[1], fs, nperseg);
  const PsdEstimate ground = welch_psd(rec.ground_accel, fs, nperseg);

  TransmissibilityCurve curve;
  curve.smoothing = "welch-hann-" + std::to_string(nperseg);
  curve.freq_hz.reserve(story.freq_hz.size());
  for (std::size_t j = 1; j < story.freq_hz.size(); ++j) {
    curve.freq_hz.push_back(story.freq_hz[j]);
    curve.ground_psd.push_back(ground.power[j]);
    curve.ratio.push_back(ground.power[j] > 0.0
                              ? std::sqrt(story.power[j] / ground.power[j])
                              : 0.0);
  }
  return curve;
}

}  // namespace vrths
