#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "vrths/degradation.hpp"
#include "vrths/engine.hpp"
#include "vrths/errors.hpp"
#include "vrths/metrics.hpp"
#include "vrths/weibull.hpp"

namespace vrths {

// Everything one short-term RTHS test needs. The isolator's elastic stiffness
// is overwritten per exposure level from the specimen's degradation model.
struct ScenarioBundle {
  BuildingModel building = BuildingModel::default_model();
  BoucWenIsolator isolator{};
  ActuatorModel actuator = ActuatorModel::place_poles(10.0, 0.7, 25.0);
  LoadCellModel load_cell{};
  ControllerConfig controller{};
  GroundMotion motion{};
  Thresholds thresholds{};
  EngineConfig engine{};

  void validate() const {
    building.validate();
    isolator.validate();
    actuator.validate();
    load_cell.validate();
    controller.validate();
    motion.validate();
    thresholds.validate();
    engine.validate();
  }
};

struct TTFSample {
  int specimen_id = 0;
  double tf_days = std::numeric_limits<double>::quiet_NaN();  // NaN when censored
  bool censored = false;
  std::string violating_metric;  // first violated metric at failure
  std::string error;             // nonempty if this specimen's scan failed
};

struct CampaignConfig {
  int specimens = 12;
  double t_step_days = 1.0;
  double t_max_days = 200.0;
  std::uint64_t master_seed = 0;
  double cov_k0 = 0.10;
  double cov_A0 = 0.05;
  double cov_m = 0.05;
  DegradationModel nominal_degradation{};
  ScenarioBundle scenario{};
  int max_parallel = 0;  // 0 = hardware concurrency

  void validate() const {
    if (specimens < 1) throw ConfigError("campaign: specimens must be >= 1");
    if (!(t_step_days > 0.0)) throw ConfigError("campaign: t_step must be > 0");
    if (!(t_max_days >= t_step_days))
      throw ConfigError("campaign: t_max must be >= t_step");
    nominal_degradation.validate();
    scenario.validate();
    if (cov_k0 < 0.0 || cov_A0 < 0.0 || cov_m < 0.0)
      throw ConfigError("campaign: coefficients of variation must be >= 0");
  }
};

// Scans the exposure grid t_step, 2 t_step, ..., t_max in order and returns
// the first level at which any performance threshold is violated; censored
// when none is by t_max. Exhaustive by design: no monotonicity of the metrics
// in exposure time is assumed.
inline TTFSample time_to_failure(const DegradationModel& specimen,
                                 const ScenarioBundle& scenario, double t_step,
                                 double t_max, int specimen_id = 0) {
  specimen.validate();
  scenario.validate();
  const StateSpaceModel structure = assemble_isolated(scenario.building);
  const GroundMotion grid_motion = resample_motion(scenario.motion, scenario.engine.dt);

  TTFSample sample;
  sample.specimen_id = specimen_id;
  const auto levels = static_cast<long>(std::floor(t_max / t_step + 1e-9));
  try {
    for (long i = 1; i <= levels; ++i) {
      const double exposure = static_cast<double>(i) * t_step;
      PlantAssembly plant{apply_degradation(scenario.isolator, specimen, exposure),
                          scenario.actuator, scenario.load_cell};
      RecordMeta meta;
      meta.exposure_days = exposure;
      const SimulationRecord rec = run_rths(structure, plant, scenario.controller,
                                            grid_motion, scenario.engine, meta);
      const MetricsReport metrics = compute_metrics(rec, scenario.building);
      const std::vector<std::string> violated =
          check_failure(metrics, scenario.thresholds);
      if (!violated.empty()) {
        sample.tf_days = exposure;
        sample.violating_metric = violated.front();
        return sample;
      }
    }
  } catch (const InstabilityError& e) {
    throw InstabilityError("specimen " + std::to_string(specimen_id) + ": " +
                           e.what());
  }
  sample.censored = true;
  return sample;
}

// Monte-Carlo campaign over sampled specimens. Specimens are independent
// tasks keyed by id with per-specimen seed substreams, so the result is
// identical for any degree of parallelism, and per-specimen failures are
// collected instead of aborting the batch.
inline std::vector<TTFSample> run_campaign(const CampaignConfig& cfg) {
  cfg.validate();
  SpecimenSampler sampler{cfg.nominal_degradation, cfg.cov_k0, cfg.cov_A0,
                          cfg.cov_m, cfg.master_seed};

  std::vector<TTFSample> results(static_cast<std::size_t>(cfg.specimens));
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int id = next.fetch_add(1);
      if (id >= cfg.specimens) return;
      try {
        const DegradationModel specimen =
            sample_specimen(sampler, static_cast<std::uint64_t>(id));
        results[static_cast<std::size_t>(id)] = time_to_failure(
            specimen, cfg.scenario, cfg.t_step_days, cfg.t_max_days, id);
      } catch (const std::exception& e) {
        TTFSample s;
        s.specimen_id = id;
        s.error = e.what();
        results[static_cast<std::size_t>(id)] = s;
      }
    }
  };

  int threads = cfg.max_parallel > 0
                    ? cfg.max_parallel
                    : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, cfg.specimens));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return results;
}

// Uncensored failure times in specimen order; throws if any sample is
// censored or errored (the MLE does not support censoring).
inline std::vector<double> uncensored_times(const std::vector<TTFSample>& samples) {
  std::vector<double> t;
  t.reserve(samples.size());
  for (const auto& s : samples) {
    if (!s.error.empty())
      throw NumericError("campaign: specimen " + std::to_string(s.specimen_id) +
                         " failed: " + s.error);
    if (s.censored)
      throw NumericError(
          "weibull fit: censored sample for specimen " +
          std::to_string(s.specimen_id) +
          " is not supported; extend t_max or drop the specimen explicitly");
    t.push_back(s.tf_days);
  }
  return t;
}

}  // namespace vrths
