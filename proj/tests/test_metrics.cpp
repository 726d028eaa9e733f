#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "vrths/config.hpp"
#include "vrths/engine.hpp"
#include "vrths/metrics.hpp"
#include "vrths/rng.hpp"

using namespace vrths;

namespace {

// A three-row record whose middle row carries the requested channel peaks.
SimulationRecord manufactured_record(double x_b, double story_offset, double top_accel,
                                     double shear, double x_m) {
  SimulationRecord rec;
  rec.dt = 0.01;
  rec.dof_labels = {"x_b", "x_1", "x_2", "x_3"};
  rec.time = {0.0, 0.01, 0.02};
  const double x_story = x_b - story_offset;
  rec.rel_disp = {{0.0, x_b, 0.0},
                  {0.0, x_story, 0.0},
                  {0.0, x_story, 0.0},
                  {0.0, x_story, 0.0}};
  rec.abs_accel = {{0.0, 0.1, 0.0},
                   {0.0, 0.1, 0.0},
                   {0.0, 0.1, 0.0},
                   {0.0, top_accel, 0.0}};
  rec.ground_accel = {0.0, 0.5, 0.0};
  rec.command = {0.0, x_b, 0.0};
  rec.measured = {0.0, x_m, 0.0};
  rec.force_true = {0.0, shear, 0.0};
  rec.force_estimate = {0.0, shear, 0.0};
  rec.force_load_cell = {0.0, shear, 0.0};
  rec.force_applied = {0.0, -shear, 0.0};
  rec.tracking_error = {0.0, x_b - x_m, 0.0};
  return rec;
}

SimulationRecord reversed(const SimulationRecord& rec) {
  SimulationRecord out = rec;
  for (auto& ch : out.rel_disp) std::reverse(ch.begin(), ch.end());
  for (auto& ch : out.abs_accel) std::reverse(ch.begin(), ch.end());
  std::reverse(out.ground_accel.begin(), out.ground_accel.end());
  std::reverse(out.command.begin(), out.command.end());
  std::reverse(out.measured.begin(), out.measured.end());
  std::reverse(out.force_estimate.begin(), out.force_estimate.end());
  return out;
}

}  // namespace

TEST_CASE("metrics of a zero record are zero") {
  const SimulationRecord rec = manufactured_record(0.0, 0.0, 0.0, 0.0, 0.0);
  const MetricsReport m = compute_metrics(rec, BuildingModel::default_model());
  CHECK(m.drift_pct == 0.0);
  CHECK(m.top_accel_g == 0.0);
  CHECK(m.base_shear == 0.0);
  CHECK(m.max_displacement == 0.0);
  CHECK(m.max_base_displacement == 0.0);
  CHECK(check_failure(m, Thresholds{}).empty());
}

TEST_CASE("published nominal and degraded peak tables") {
  const BuildingModel model = BuildingModel::default_model();  // 3 m stories
  const Thresholds defaults{};

  SECTION("nominal-state values") {
    // drift 0.003%, top 0.08 g, shear 23.43 kN, disp 23.33 cm, base 23.32 cm.
    const SimulationRecord rec = manufactured_record(
        0.2333, 0.00003 * 3.0, 0.08 * 9.81, 2.343e4, 0.2332);
    const MetricsReport m = compute_metrics(rec, model);
    CHECK(m.drift_pct == Catch::Approx(0.003).epsilon(1e-9));
    CHECK(m.top_accel_g == Catch::Approx(0.08).epsilon(1e-9));
    CHECK(m.base_shear == Catch::Approx(2.343e4).epsilon(1e-12));
    CHECK(m.max_displacement == Catch::Approx(0.2333).epsilon(1e-12));
    CHECK(m.max_base_displacement == Catch::Approx(0.2332).epsilon(1e-12));

    // Strictly applied, the published requireds are NOT all met at nominal:
    // the 23.33 cm peak displacement exceeds the 14 cm requirement even
    // before any degradation. Drift, acceleration, shear and base
    // displacement pass.
    const auto violated = check_failure(m, defaults);
    CHECK(violated == std::vector<std::string>{"max_displacement"});
  }

  SECTION("120-day degraded values violate exactly three requirements") {
    // drift 0.018%, top 0.38 g, shear 126.20 kN, disp 35.48 cm, base 35.34 cm.
    const SimulationRecord rec = manufactured_record(
        0.3548, 0.00018 * 3.0, 0.38 * 9.81, 1.262e5, 0.3534);
    const MetricsReport m = compute_metrics(rec, model);
    const auto violated = check_failure(m, defaults);
    CHECK(violated == std::vector<std::string>{"base_shear", "max_displacement",
                                               "max_base_displacement"});
  }
}

TEST_CASE("metric arithmetic properties") {
  const BuildingModel model = BuildingModel::default_model();
  SimulationRecord rec = manufactured_record(0.1, 0.002, 1.5, 4.0e4, 0.09);

  SECTION("doubling displacement channels doubles displacement metrics") {
    const MetricsReport base = compute_metrics(rec, model);
    SimulationRecord doubled = rec;
    for (auto& ch : doubled.rel_disp)
      for (double& v : ch) v *= 2.0;
    for (double& v : doubled.measured) v *= 2.0;
    const MetricsReport twice = compute_metrics(doubled, model);
    CHECK(twice.drift_pct == Catch::Approx(2.0 * base.drift_pct));
    CHECK(twice.max_displacement == Catch::Approx(2.0 * base.max_displacement));
    CHECK(twice.max_base_displacement ==
          Catch::Approx(2.0 * base.max_base_displacement));
    CHECK(twice.top_accel_g == Catch::Approx(base.top_accel_g));
  }

  SECTION("time reversal leaves every metric unchanged") {
    const MetricsReport a = compute_metrics(rec, model);
    const MetricsReport b = compute_metrics(reversed(rec), model);
    CHECK(a.drift_pct == b.drift_pct);
    CHECK(a.top_accel_g == b.top_accel_g);
    CHECK(a.base_shear == b.base_shear);
    CHECK(a.max_displacement == b.max_displacement);
    CHECK(a.max_base_displacement == b.max_base_displacement);
  }

  SECTION("metrics are non-negative") {
    const MetricsReport m = compute_metrics(rec, model);
    CHECK(m.drift_pct >= 0.0);
    CHECK(m.top_accel_g >= 0.0);
    CHECK(m.base_shear >= 0.0);
    CHECK(m.max_displacement >= 0.0);
    CHECK(m.max_base_displacement >= 0.0);
  }
}

TEST_CASE("failure checking") {
  MetricsReport m;
  m.drift_pct = 0.5;
  m.top_accel_g = 1.0;
  m.base_shear = 3.0e4;
  m.max_displacement = 0.10;
  m.max_base_displacement = 0.20;

  SECTION("a metric equal to its threshold does not violate") {
    Thresholds t;
    t.max_drift_pct = 0.5;
    t.max_top_accel_g = 1.0;
    t.max_base_shear = 3.0e4;
    t.max_displacement = 0.10;
    t.max_base_displacement = 0.20;
    CHECK(check_failure(m, t).empty());
  }

  SECTION("enlarging any threshold never adds a violation") {
    RandomStream rng(5);
    for (int trial = 0; trial < 200; ++trial) {
      MetricsReport r;
      r.drift_pct = rng.uniform(0.0, 2.0);
      r.top_accel_g = rng.uniform(0.0, 4.0);
      r.base_shear = rng.uniform(0.0, 2.0e5);
      r.max_displacement = rng.uniform(0.0, 0.5);
      r.max_base_displacement = rng.uniform(0.0, 0.5);
      Thresholds t;
      t.max_drift_pct = rng.uniform(0.01, 2.0);
      t.max_top_accel_g = rng.uniform(0.01, 4.0);
      t.max_base_shear = rng.uniform(1.0, 2.0e5);
      t.max_displacement = rng.uniform(0.01, 0.5);
      t.max_base_displacement = rng.uniform(0.01, 0.5);
      const auto before = check_failure(r, t);
      Thresholds larger = t;
      larger.max_drift_pct *= 1.5;
      larger.max_top_accel_g *= 1.5;
      larger.max_base_shear *= 1.5;
      larger.max_displacement *= 1.5;
      larger.max_base_displacement *= 1.5;
      const auto after = check_failure(r, larger);
      for (const auto& v : after)
        REQUIRE(std::find(before.begin(), before.end(), v) != before.end());
    }
  }
}

TEST_CASE("scalar transmissibility") {
  SECTION("story acceleration equal to the ground gives one") {
    SimulationRecord rec = manufactured_record(0.0, 0.0, 0.0, 0.0, 0.0);
    rec.abs_accel[1] = {0.1, -0.5, 0.2};
    rec.ground_accel = {0.1, -0.5, 0.2};
    CHECK(transmissibility_scalar(rec) == Catch::Approx(1.0));
  }

  SECTION("zero ground motion is rejected") {
    SimulationRecord rec = manufactured_record(0.0, 0.0, 0.0, 0.0, 0.0);
    rec.ground_accel.assign(rec.size(), 0.0);
    CHECK_THROWS_AS(transmissibility_scalar(rec), NumericError);
  }

  SECTION("rigid structure on a rigid isolator transmits unity") {
    BuildingModel b = BuildingModel::default_model();
    b.story_stiffnesses = {1.0e9, 1.0e9, 1.0e9};
    // Stiffness-proportional damping quiets the (numerically undamped)
    // high modes without touching the excitation band.
    b.damping = RayleighCoefficients{0.1, 1.3e-4};
    EngineConfig cfg;
    cfg.dt = 1.0 / 8192.0;
    const double k_rigid = 2039.0 * std::pow(2.0 * std::numbers::pi * 120.0, 2);

    GroundMotion motion;
    motion.dt = cfg.dt;
    RandomStream rng(3);
    // Band-limited noise: random multisine 0.3 - 8 Hz, ramped in so the
    // start transient does not ping the isolation mode.
    std::vector<double> f, a, p;
    for (int i = 0; i < 24; ++i) {
      f.push_back(rng.uniform(0.3, 8.0));
      a.push_back(rng.uniform(0.2, 1.0));
      p.push_back(rng.uniform(0.0, 6.28));
    }
    for (double t = 0.0; t <= 10.0; t += cfg.dt) {
      double s = 0.0;
      for (std::size_t i = 0; i < f.size(); ++i)
        s += a[i] * std::sin(2.0 * std::numbers::pi * f[i] * t + p[i]);
      const double ramp = t < 1.0 ? 0.5 * (1.0 - std::cos(std::numbers::pi * t)) : 1.0;
      motion.samples.push_back(ramp * s);
    }
    const SimulationRecord rec =
        run_monolithic_reference(assemble_isolated(b), k_rigid, motion, cfg);
    CHECK(transmissibility_scalar(rec) == Catch::Approx(1.0).epsilon(0.02));
  }

  SECTION("isolation beats the fixed base on the same motion") {
    RunConfig cfg;
    cfg.motion_duration = 20.0;
    const ScenarioBundle s = cfg.scenario();
    EngineConfig eng = s.engine;
    const SimulationRecord iso = run_monolithic_reference(
        assemble_isolated(s.building), s.isolator.k, s.motion, eng);
    const SimulationRecord fixed = run_monolithic_reference(
        assemble_fixed_base(s.building), 0.0, s.motion, eng);
    const double ratio_iso = transmissibility_scalar(iso);
    // Fixed-base record has story 1 at channel 0.
    double story = 0.0, ground = 0.0;
    for (std::size_t i = 0; i < fixed.size(); ++i) {
      story = std::max(story, std::abs(fixed.abs_accel[0][i]));
      ground = std::max(ground, std::abs(fixed.ground_accel[i]));
    }
    const double ratio_fixed = story / ground;
    CHECK(ratio_iso < ratio_fixed);
  }
}

TEST_CASE("transmissibility curve") {
  SECTION("identical channels give a flat unity curve") {
    SimulationRecord rec;
    rec.dt = 1.0 / 256.0;
    rec.dof_labels = {"x_b", "x_1"};
    RandomStream rng(11);
    const int n = 4096;
    rec.rel_disp.assign(2, std::vector<double>(n, 0.0));
    std::vector<double> noise(n);
    for (auto& v : noise) v = rng.normal();
    rec.abs_accel = {noise, noise};
    rec.ground_accel = noise;
    rec.command.assign(n, 0.0);
    rec.measured.assign(n, 0.0);
    rec.force_true.assign(n, 0.0);
    rec.force_estimate.assign(n, 0.0);
    rec.force_load_cell.assign(n, 0.0);
    rec.force_applied.assign(n, 0.0);
    rec.tracking_error.assign(n, 0.0);
    rec.time.resize(n);
    for (int i = 0; i < n; ++i) rec.time[static_cast<std::size_t>(i)] = i * rec.dt;

    const TransmissibilityCurve curve = transmissibility_curve(rec, 512);
    for (std::size_t j = 0; j < curve.freq_hz.size(); ++j) {
      REQUIRE(curve.ratio[j] == Catch::Approx(1.0).epsilon(1e-9));
      if (j) REQUIRE(curve.freq_hz[j] > curve.freq_hz[j - 1]);
    }

    SECTION("scaling the record leaves the curve invariant") {
      SimulationRecord scaled = rec;
      for (double& v : scaled.abs_accel[1]) v *= 37.5;
      for (double& v : scaled.ground_accel) v *= 37.5;
      const TransmissibilityCurve c2 = transmissibility_curve(scaled, 512);
      for (std::size_t j = 0; j < c2.ratio.size(); ++j)
        REQUIRE(c2.ratio[j] == Catch::Approx(curve.ratio[j]).epsilon(1e-9));
    }
  }

  SECTION("record shorter than two windows is rejected") {
    const SimulationRecord rec = manufactured_record(0.0, 0.0, 0.0, 0.0, 0.0);
    CHECK_THROWS_AS(transmissibility_curve(rec, 512), NumericError);
  }

  SECTION("white-noise excitation reproduces the analytic FRF near resonance") {
    BuildingModel b = BuildingModel::default_model();
    const double k_iso = 4.60e4;
    EngineConfig cfg;

    GroundMotion motion;
    motion.dt = cfg.dt;
    RandomStream rng(23);
    const double fs = 1.0 / cfg.dt;
    const auto n = static_cast<std::size_t>(400.0 * fs);
    motion.samples.resize(n);
    for (double& v : motion.samples) v = rng.normal();

    const StateSpaceModel structure = assemble_isolated(b);
    const SimulationRecord rec =
        run_monolithic_reference(structure, k_iso, motion, cfg);
    const int nperseg = 65536;
    const TransmissibilityCurve curve = transmissibility_curve(rec, nperseg);

    // Analytic FRF of the monolithic model: ground accel -> story-1 absolute
    // acceleration.
    const StateSpaceModel mono = with_linear_base_spring(structure, k_iso);
    auto frf = [&](double f_hz) {
      const std::complex<double> jw(0.0, 2.0 * std::numbers::pi * f_hz);
      const Eigen::MatrixXcd R =
          (jw * Eigen::MatrixXcd::Identity(8, 8) - mono.A.cast<std::complex<double>>())
              .inverse();
      const Eigen::VectorXcd x = R * mono.B.col(0).cast<std::complex<double>>();
      return std::abs((mono.C.row(5).cast<std::complex<double>>() * x)(0));
    };

    // Locate the resonance and compare over +-15% around it.
    double f_peak = 0.5, peak = 0.0;
    for (double f = 0.3; f < 1.5; f += 0.005) {
      const double m = frf(f);
      if (m > peak) {
        peak = m;
        f_peak = f;
      }
    }
    int compared = 0;
    for (std::size_t j = 0; j < curve.freq_hz.size(); ++j) {
      const double f = curve.freq_hz[j];
      if (f < 0.85 * f_peak || f > 1.15 * f_peak) continue;
      REQUIRE(curve.ratio[j] == Catch::Approx(frf(f)).epsilon(0.05));
      ++compared;
    }
    REQUIRE(compared >= 5);
  }
}
