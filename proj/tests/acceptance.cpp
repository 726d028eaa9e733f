// Acceptance suite: every criterion prints one pass/fail line. Run directly
// or through ctest.
#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <vector>

#include "vrths/cli.hpp"
#include "vrths/vrths.hpp"

using namespace vrths;
namespace fs = std::filesystem;

namespace {

struct Stopwatch {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

void report(int id, const std::string& name, bool pass, const std::string& detail,
            double seconds) {
  std::printf("[acceptance] criterion %d (%s): %s  — %s [%.1f s]\n", id,
              name.c_str(), pass ? "PASS" : "FAIL", detail.c_str(), seconds);
  std::fflush(stdout);
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("vrths_acceptance_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  if (code != 0) UNSCOPED_INFO("cli stderr: " << err.str());
  return code;
}

const ScenarioBundle& default_scenario() {
  static const ScenarioBundle s = RunConfig{}.scenario();
  return s;
}

const StateSpaceModel& default_structure() {
  static const StateSpaceModel ss = assemble_isolated(default_scenario().building);
  return ss;
}

SimulationRecord run_default_at(double exposure_days) {
  const ScenarioBundle& s = default_scenario();
  PlantAssembly plant{
      apply_degradation(s.isolator, RunConfig{}.degradation(), exposure_days),
      s.actuator, s.load_cell};
  RecordMeta meta;
  meta.exposure_days = exposure_days;
  return run_rths(default_structure(), plant, s.controller, s.motion, s.engine, meta);
}

double peak_abs(const std::vector<double>& v) {
  double p = 0.0;
  for (double x : v) p = std::max(p, std::abs(x));
  return p;
}

}  // namespace

TEST_CASE("criterion 1: degradation calibration") {
  Stopwatch sw;
  const fs::path dir = fresh_dir("c1");
  {
    std::ofstream obs(dir / "obs.csv");
    obs << "14,0.02\n31,0.12\n";
  }
  const int code =
      cli({"fit-deg", "--obs", (dir / "obs.csv").string(), "--out-dir", dir.string()});
  bool pass = code == 0;
  double m_fit = 0.0, a0_fit = 0.0;
  if (pass) {
    const auto j = load_json(dir / "degradation_fit.json");
    m_fit = j.at("m").get<double>();
    a0_fit = j.at("A0").get<double>();
    const double m_oracle = std::log(6.0) / std::log(31.0 / 14.0);
    pass = std::abs(m_fit - 2.254) <= 1e-3 && std::abs(m_fit - m_oracle) <= 1e-9 &&
           std::abs(a0_fit / 5.22e-5 - 1.0) <= 0.02;
  }

  // Shipped constants reproduce the observations within 0.5 percentage points.
  const DegradationModel paper{};
  const double f14 = stiffness_at(paper, 14.0) / paper.k0 - 1.0;
  const double f31 = stiffness_at(paper, 31.0) / paper.k0 - 1.0;
  pass = pass && std::abs(f14 - 0.02) <= 0.005 && std::abs(f31 - 0.12) <= 0.005;

  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "m = %.4f, A0 = %.3e; shipped constants give +%.2f%%/+%.2f%% at "
                "14/31 days",
                m_fit, a0_fit, 100.0 * f14, 100.0 * f31);
  report(1, "degradation calibration", pass, detail, sw.seconds());
  REQUIRE(pass);
  REQUIRE(sw.seconds() < 1.0);
}

TEST_CASE("criterion 2: MTTF identity") {
  Stopwatch sw;
  const double value = mttf(7.35, 102.74);
  const bool pass = value >= 96.0 && value <= 97.0;
  char detail[96];
  std::snprintf(detail, sizeof(detail),
                "scale*Gamma(1+1/shape) = %.3f days (published 96.35)", value);
  report(2, "MTTF identity", pass, detail, sw.seconds());
  REQUIRE(pass);
  REQUIRE(sw.seconds() < 1.0);
}

TEST_CASE("criterion 3: tracking acceptance") {
  Stopwatch sw;
  const SimulationRecord rec = run_default_at(0.0);
  const double nrms = nrms_tracking_error(rec.command, rec.measured);

  // Regression guard: the feedforward path must be earning its keep.
  ScenarioBundle no_ff = default_scenario();
  no_ff.controller.k_ff = 0.0;
  const SimulationRecord rec_no_ff =
      run_rths(default_structure(), {no_ff.isolator, no_ff.actuator, no_ff.load_cell},
               no_ff.controller, no_ff.motion, no_ff.engine);
  const double nrms_no_ff = nrms_tracking_error(rec_no_ff.command, rec_no_ff.measured);

  const bool pass = nrms < 1.2 && nrms < nrms_no_ff;
  char detail[128];
  std::snprintf(detail, sizeof(detail),
                "NRMS tracking error = %.3f%% (< 1.2%%); feedforward off: %.3f%%",
                nrms, nrms_no_ff);
  report(3, "tracking acceptance", pass, detail, sw.seconds());
  REQUIRE(pass);
  REQUIRE(sw.seconds() < 30.0);
}

TEST_CASE("criterion 4: oracle equivalence") {
  Stopwatch sw;
  const ScenarioBundle& s = default_scenario();
  ScenarioBundle linear = s;
  linear.isolator.alpha = 0.0;
  linear.engine.plant_mode = PlantMode::ideal;
  const SimulationRecord hybrid =
      run_rths(default_structure(), {linear.isolator, linear.actuator, linear.load_cell},
               linear.controller, linear.motion, linear.engine);
  const SimulationRecord mono = run_monolithic_reference(
      default_structure(), linear.isolator.k, linear.motion, linear.engine);

  const double disp_h = peak_abs(hybrid.rel_disp[0]);
  const double disp_m = peak_abs(mono.rel_disp[0]);
  const double acc_h = peak_abs(hybrid.abs_accel[3]);
  const double acc_m = peak_abs(mono.abs_accel[3]);
  const double disp_err = std::abs(disp_h - disp_m) / disp_m;
  const double acc_err = std::abs(acc_h - acc_m) / acc_m;
  const bool pass = disp_err < 1e-3 && acc_err < 1e-3;
  char detail[128];
  std::snprintf(detail, sizeof(detail),
                "peak base disp err = %.2e, peak top accel err = %.2e (< 1e-3)",
                disp_err, acc_err);
  report(4, "oracle equivalence", pass, detail, sw.seconds());
  REQUIRE(pass);
  REQUIRE(sw.seconds() < 30.0);
}

TEST_CASE("criterion 5: hysteresis properties") {
  Stopwatch sw;
  BoucWenIsolator iso;  // defaults
  const double zu = iso.ultimate_z();
  const double dt = 1.0 / 1024.0;

  bool bounded = true;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    RandomStream rng(5000 + static_cast<std::uint64_t>(trial));
    const double w1 = rng.uniform(0.3, 3.0) * 2.0 * std::numbers::pi;
    const double w2 = rng.uniform(3.0, 14.0) * 2.0 * std::numbers::pi;
    const double a1 = rng.uniform(0.0, 1.5), a2 = rng.uniform(0.0, 0.6);
    const double p1 = rng.uniform(0.0, 6.28), p2 = rng.uniform(0.0, 6.28);
    double z = 0.0;
    for (int k = 0; k < 4096; ++k) {
      const double t0 = k * dt, t1 = (k + 1) * dt, tm = t0 + 0.5 * dt;
      auto vel = [&](double t) {
        return a1 * std::sin(w1 * t + p1) + a2 * std::sin(w2 * t + p2);
      };
      const double k1 = bouc_wen_rate(iso, vel(t0), z);
      const double k2 = bouc_wen_rate(iso, vel(tm), z + 0.5 * dt * k1);
      const double k3 = bouc_wen_rate(iso, vel(tm), z + 0.5 * dt * k2);
      const double k4 = bouc_wen_rate(iso, vel(t1), z + dt * k3);
      z += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      worst = std::max(worst, std::abs(z));
    }
    if (worst > zu * (1.0 + 1e-9)) bounded = false;
  }

  // Closed displacement cycles of several amplitudes dissipate energy.
  bool dissipative = true;
  double min_area = 1e300;
  for (double amp : {0.002, 0.012, 0.05, 0.2}) {
    double z = 0.0, area = 0.0, x_prev = 0.0, r_prev = 0.0;
    const double w = 2.0 * std::numbers::pi * 0.5;
    const int steps = static_cast<int>(2.0 * 2.0 * std::numbers::pi / w / dt);
    for (int k = 1; k <= steps; ++k) {
      const double t = k * dt;
      const double x = amp * std::sin(w * t);
      auto vel = [&](double tt) { return amp * w * std::cos(w * tt); };
      const double k1 = bouc_wen_rate(iso, vel(t - dt), z);
      const double k2 = bouc_wen_rate(iso, vel(t - 0.5 * dt), z + 0.5 * dt * k1);
      const double k3 = bouc_wen_rate(iso, vel(t - 0.5 * dt), z + 0.5 * dt * k2);
      const double k4 = bouc_wen_rate(iso, vel(t), z + dt * k3);
      z += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      const double r = restoring_force(iso, x, z);
      if (k > steps / 2) area += 0.5 * (r + r_prev) * (x - x_prev);
      x_prev = x;
      r_prev = r;
    }
    min_area = std::min(min_area, area);
    if (!(area >= 0.0)) dissipative = false;
  }

  const bool pass = bounded && dissipative;
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "max |z| = %.6f m (bound %.6f m) over 100 excitations; min cycle "
                "energy = %.3e J",
                worst, zu, min_area);
  report(5, "hysteresis properties", pass, detail, sw.seconds());
  REQUIRE(pass);
  REQUIRE(sw.seconds() < 60.0);
}

TEST_CASE("criterion 6: degradation ordering") {
  Stopwatch sw;
  const BuildingModel model = default_scenario().building;
  const SimulationRecord nominal = run_default_at(0.0);
  const SimulationRecord degraded = run_default_at(120.0);
  const MetricsReport m0 = compute_metrics(nominal, model);
  const MetricsReport m120 = compute_metrics(degraded, model);

  const bool metrics_ordered = m120.drift_pct >= m0.drift_pct &&
                               m120.top_accel_g >= m0.top_accel_g &&
                               m120.base_shear >= m0.base_shear &&
                               m120.max_displacement >= m0.max_displacement &&
                               m120.max_base_displacement >= m0.max_base_displacement;

  const int nperseg = 4096;
  const TransmissibilityCurve c0 = transmissibility_curve(nominal, nperseg);
  const TransmissibilityCurve c120 = transmissibility_curve(degraded, nperseg);
  auto peak_of = [](const TransmissibilityCurve& c) {
    std::pair<double, double> best{0.0, 0.0};
    for (std::size_t j = 0; j < c.freq_hz.size(); ++j)
      if (c.freq_hz[j] < 20.0 && c.ratio[j] > best.second)
        best = {c.freq_hz[j], c.ratio[j]};
    return best;
  };
  const auto [f0, v0] = peak_of(c0);
  const auto [f120, v120] = peak_of(c120);
  const bool peak_shifts = f120 > f0 && v120 > v0;

  // Dominant band of the excitation: bins with at least half the peak ground
  // PSD. The degraded curve must exceed 1 somewhere inside it.
  double gpeak = 0.0;
  for (double p : c0.ground_psd) gpeak = std::max(gpeak, p);
  bool above_one_in_band = false;
  double band_lo = 0.0, band_hi = 0.0;
  for (std::size_t j = 0; j < c120.freq_hz.size(); ++j) {
    if (c0.ground_psd[j] < 0.5 * gpeak) continue;
    if (band_lo == 0.0) band_lo = c120.freq_hz[j];
    band_hi = c120.freq_hz[j];
    if (c120.ratio[j] > 1.0) above_one_in_band = true;
  }

  const bool pass = metrics_ordered && peak_shifts && above_one_in_band;
  char detail[240];
  std::snprintf(detail, sizeof(detail),
                "disp %.3f->%.3f m, shear %.1f->%.1f kN; trans peak %.2f Hz "
                "x%.2f -> %.2f Hz x%.2f; >1 in [%.2f, %.2f] Hz: %s",
                m0.max_displacement, m120.max_displacement, m0.base_shear / 1e3,
                m120.base_shear / 1e3, f0, v0, f120, v120, band_lo, band_hi,
                above_one_in_band ? "yes" : "no");
  report(6, "degradation ordering", pass, detail, sw.seconds());
  REQUIRE(pass);
  REQUIRE(sw.seconds() < 120.0);
}

TEST_CASE("criterion 7: statistical pipeline") {
  Stopwatch sw;

  // MLE round-trip on a large synthetic sample.
  RandomStream rng(20260809);
  std::vector<double> t(10000);
  for (double& v : t) v = rng.weibull(7.35, 102.74);
  const WeibullFit fit = weibull_mle(t);
  const bool mle_ok = std::abs(fit.shape / 7.35 - 1.0) <= 0.02 &&
                      std::abs(fit.scale / 102.74 - 1.0) <= 0.02;

  // Fragility at the characteristic life.
  const FragilityCurve frag =
      fragility_curve(WeibullFit{7.35, 102.74, 0.0, 0.0}, std::vector<double>{102.74});
  const bool frag_ok =
      std::abs(frag.probability[0] - (1.0 - std::exp(-1.0))) <= 1e-9;

  // Bootstrap-KS calibration: rejection rate at the 5% level over 200 seeded
  // trials of n = 12 drawn from the fitted family.
  int rejections = 0;
  const int trials = 200;
  for (int i = 0; i < trials; ++i) {
    RandomStream draw(777000 + static_cast<std::uint64_t>(i));
    std::vector<double> sample(12);
    for (double& v : sample) v = draw.weibull(7.35, 102.74);
    const WeibullFit f = weibull_mle(sample);
    const double p =
        goodness_of_fit(sample, f, 2000, 31337 + static_cast<std::uint64_t>(i));
    if (p < 0.05) ++rejections;
  }
  const double rate = 100.0 * rejections / trials;
  const bool calibrated = rate >= 2.0 && rate <= 9.0;

  const bool pass = mle_ok && frag_ok && calibrated;
  char detail[200];
  std::snprintf(detail, sizeof(detail),
                "MLE shape %.3f scale %.2f (truth 7.35/102.74); CDF(scale) err "
                "%.1e; KS rejection rate %.1f%% (target [2, 9])",
                fit.shape, fit.scale,
                std::abs(frag.probability[0] - (1.0 - std::exp(-1.0))), rate);
  report(7, "statistical pipeline", pass, detail, sw.seconds());
  REQUIRE(pass);
  REQUIRE(sw.seconds() < 300.0);
}

TEST_CASE("criterion 8: campaign determinism and workflow") {
  Stopwatch sw;
  const fs::path dir = fresh_dir("c8");
  const std::string seed = "2026";

  REQUIRE(cli({"mc", "--specimens", "12", "--seed", seed, "--out-dir",
               (dir / "a").string()}) == 0);
  REQUIRE(cli({"mc", "--specimens", "12", "--seed", seed, "--out-dir",
               (dir / "b").string()}) == 0);
  const std::string bytes_a = read_bytes(dir / "a" / "ttf.csv");
  const std::string bytes_b = read_bytes(dir / "b" / "ttf.csv");
  const bool identical = !bytes_a.empty() && bytes_a == bytes_b;

  const std::vector<TTFSample> coarse = load_ttf_csv(dir / "a" / "ttf.csv");
  bool all_finite = coarse.size() == 12;
  for (const auto& s : coarse)
    if (s.censored || !s.error.empty() || !std::isfinite(s.tf_days))
      all_finite = false;

  REQUIRE(cli({"mc", "--specimens", "12", "--seed", seed, "--t-step", "0.5",
               "--out-dir", (dir / "fine").string()}) == 0);
  const std::vector<TTFSample> fine = load_ttf_csv(dir / "fine" / "ttf.csv");
  bool refined_close = fine.size() == coarse.size();
  double max_shift = 0.0;
  if (refined_close) {
    for (std::size_t i = 0; i < fine.size(); ++i) {
      const double shift = std::abs(fine[i].tf_days - coarse[i].tf_days);
      max_shift = std::max(max_shift, shift);
      if (!(shift <= 1.0) || fine[i].tf_days > coarse[i].tf_days)
        refined_close = false;
    }
  }

  // Fit sanity: the fitted mean lies inside the observed failure range.
  bool mttf_in_range = false;
  double mean_days = 0.0;
  if (all_finite) {
    const std::vector<double> times = uncensored_times(coarse);
    const WeibullFit fit = weibull_mle(times);
    mean_days = mttf(fit);
    const auto [lo, hi] = std::minmax_element(times.begin(), times.end());
    mttf_in_range = mean_days >= *lo && mean_days <= *hi;
  }

  const bool pass = identical && all_finite && refined_close && mttf_in_range;
  char detail[220];
  std::snprintf(detail, sizeof(detail),
                "byte-identical: %s; 12/12 failures finite: %s; max refinement "
                "shift %.2f d (<= 1); MTTF %.1f d inside the sample range: %s",
                identical ? "yes" : "no", all_finite ? "yes" : "no", max_shift,
                mean_days, mttf_in_range ? "yes" : "no");
  report(8, "campaign determinism and workflow", pass, detail, sw.seconds());
  REQUIRE(pass);
  REQUIRE(sw.seconds() < 1800.0);
}
