#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vrths/config.hpp"
#include "vrths/io.hpp"

namespace vrths {

namespace detail {

inline constexpr const char* kExitCodeFooter =
    "Exit codes: 0 success, 2 usage error, 3 invalid configuration,\n"
    "            4 I/O error, 5 numerical/fit error, 6 simulation instability.\n"
    "Environment: VRTHS_OUT_DIR sets the default output directory.";

struct CliState {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;

  RunConfig load() const {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (seed_set) cfg.master_seed = seed;
    return cfg;
  }
};

inline void add_common(CLI::App* sub, CliState& st) {
  sub->add_option("--config", st.config_path,
                  "Config file (sectioned key=value or JSON)");
  sub->add_option("--out-dir", st.out_dir, "Output directory");
  sub->add_option("--seed", st.seed, "Master seed override")
      ->each([&st](const std::string&) { st.seed_set = true; });
  sub->footer(kExitCodeFooter);
}

inline RecordMeta make_meta(const RunConfig& cfg, double exposure_days,
                            const std::string& motion_label = {}) {
  RecordMeta meta;
  meta.config_hash = cfg.hash();
  meta.seed = cfg.master_seed;
  meta.exposure_days = exposure_days;
  meta.motion_label = motion_label;
  return meta;
}

}  // namespace detail

// Command-line surface. Returns the process exit status; all output goes to
// the provided streams so tests can drive it in-process.
inline int run_cli(std::vector<std::string> args, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  CLI::App app{"vrths: virtual real-time hybrid simulation testbed for "
               "long-term isolator degradation"};
  app.require_subcommand(1);
  app.footer(detail::kExitCodeFooter);

  detail::CliState st;

  // --- simulate ---------------------------------------------------------
  auto* sim = app.add_subcommand(
      "simulate", "One RTHS test at a given exposure; writes record + metrics");
  double exposure_days = 0.0;
  std::string motion_override;
  detail::add_common(sim, st);
  sim->add_option("--exposure-days", exposure_days,
                  "Degradation exposure in days (default 0 = nominal)");
  sim->add_option("--motion", motion_override, "Ground motion CSV override");
  sim->callback([&]() {
    RunConfig cfg = st.load();
    if (!motion_override.empty()) {
      cfg.motion_source = "csv";
      cfg.motion_path = motion_override;
    }
    cfg.validate();
    if (exposure_days < 0.0)
      throw ConfigError("simulate: exposure must be >= 0 days");
    ScenarioBundle scenario = cfg.scenario();
    scenario.isolator = apply_degradation(scenario.isolator, cfg.degradation(),
                                          exposure_days);
    const StateSpaceModel structure = assemble_isolated(scenario.building);
    const RecordMeta meta = detail::make_meta(cfg, exposure_days);
    const SimulationRecord rec =
        run_rths(structure, {scenario.isolator, scenario.actuator, scenario.load_cell},
                 scenario.controller, scenario.motion, scenario.engine, meta);
    MetricsReport metrics = compute_metrics(rec, scenario.building);
    metrics.violated = check_failure(metrics, scenario.thresholds);
    const TrackingReport tracking = tracking_report(rec.command, rec.measured);

    const auto dir = cfg.resolved_output_dir();
    write_record_csv(rec, dir / "record.csv");
    write_json(metrics_to_json(metrics, tracking, rec.meta), dir / "metrics.json");
    out << "record:  " << (dir / "record.csv").string() << "\n"
        << "metrics: " << (dir / "metrics.json").string() << "\n"
        << "max displacement [m]: " << format_double(metrics.max_displacement) << "\n"
        << "tracking NRMS [%]:    " << format_double(tracking.nrms_error_pct) << "\n"
        << "violated: ";
    if (metrics.violated.empty()) {
      out << "none";
    } else {
      for (std::size_t i = 0; i < metrics.violated.size(); ++i)
        out << (i ? ", " : "") << metrics.violated[i];
    }
    out << "\n";
  });

  // --- campaign ----------------------------------------------------------
  auto* camp = app.add_subcommand(
      "campaign", "Degrade-test loop for one deterministic specimen");
  detail::add_common(camp, st);
  camp->callback([&]() {
    RunConfig cfg = st.load();
    cfg.validate();
    const ScenarioBundle scenario = cfg.scenario();
    const StateSpaceModel structure = assemble_isolated(scenario.building);
    const DegradationModel deg = cfg.degradation();
    const GroundMotion motion = resample_motion(scenario.motion, scenario.engine.dt);
    const auto dir = cfg.resolved_output_dir();

    auto csv = detail::open_out(dir / "campaign_metrics.csv");
    detail::write_meta_comments(csv, detail::make_meta(cfg, 0.0));
    csv << "t_days,drift_pct,top_accel_g,base_shear_N,max_displacement_m,"
           "max_base_displacement_m,violated\n";

    TTFSample ttf;
    ttf.censored = true;
    const auto levels =
        static_cast<long>(std::floor(cfg.t_max_days / cfg.t_step_days + 1e-9));
    for (long i = 0; i <= levels; ++i) {
      const double exposure = static_cast<double>(i) * cfg.t_step_days;
      PlantAssembly plant{apply_degradation(scenario.isolator, deg, exposure),
                          scenario.actuator, scenario.load_cell};
      const SimulationRecord rec =
          run_rths(structure, plant, scenario.controller, motion, scenario.engine,
                   detail::make_meta(cfg, exposure));
      MetricsReport m = compute_metrics(rec, scenario.building);
      m.violated = check_failure(m, scenario.thresholds);
      csv << format_double(exposure) << "," << format_double(m.drift_pct) << ","
          << format_double(m.top_accel_g) << "," << format_double(m.base_shear) << ","
          << format_double(m.max_displacement) << ","
          << format_double(m.max_base_displacement) << ",";
      for (std::size_t v = 0; v < m.violated.size(); ++v)
        csv << (v ? ";" : "") << m.violated[v];
      csv << "\n";
      if (i == 0) {
        write_record_csv(rec, dir / "record_nominal.csv");
      } else if (!m.violated.empty()) {
        ttf.censored = false;
        ttf.tf_days = exposure;
        ttf.violating_metric = m.violated.front();
        write_record_csv(rec, dir / "record_failure.csv");
        break;
      }
    }

    nlohmann::ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["config_hash"] = cfg.hash();
    j["seed"] = cfg.master_seed;
    j["censored"] = ttf.censored;
    if (!ttf.censored) {
      j["tf_days"] = ttf.tf_days;
      j["violating_metric"] = ttf.violating_metric;
    }
    write_json(j, dir / "ttf.json");
    out << "campaign metrics: " << (dir / "campaign_metrics.csv").string() << "\n";
    if (ttf.censored)
      out << "no failure by t_max = " << format_double(cfg.t_max_days) << " days\n";
    else
      out << "time to failure: " << format_double(ttf.tf_days) << " days ("
          << ttf.violating_metric << ")\n";
  });

  // --- mc ------------------------------------------------------------------
  auto* mc = app.add_subcommand(
      "mc", "Monte-Carlo campaign over sampled specimens; writes TTF CSV");
  int mc_specimens = -1;
  double mc_tstep = -1.0, mc_tmax = -1.0;
  int mc_jobs = -1;
  detail::add_common(mc, st);
  mc->add_option("--specimens", mc_specimens, "Number of specimens (default 12)");
  mc->add_option("--t-step", mc_tstep, "Exposure grid step in days");
  mc->add_option("--t-max", mc_tmax, "Exposure cap in days");
  mc->add_option("--jobs", mc_jobs, "Worker threads (result is identical)");
  mc->callback([&]() {
    RunConfig cfg = st.load();
    if (mc_specimens > 0) cfg.specimens = mc_specimens;
    if (mc_tstep > 0.0) cfg.t_step_days = mc_tstep;
    if (mc_tmax > 0.0) cfg.t_max_days = mc_tmax;
    if (mc_jobs > 0) cfg.max_parallel = mc_jobs;
    cfg.validate();
    const CampaignConfig campaign = cfg.campaign();
    const std::vector<TTFSample> samples = run_campaign(campaign);
    const auto dir = cfg.resolved_output_dir();
    write_ttf_csv(samples, detail::make_meta(cfg, 0.0), dir / "ttf.csv");
    out << "ttf samples: " << (dir / "ttf.csv").string() << "\n";
    int failures = 0, censored = 0, errors = 0;
    for (const auto& s : samples) {
      if (!s.error.empty())
        ++errors;
      else if (s.censored)
        ++censored;
      else
        ++failures;
    }
    out << failures << " failed, " << censored << " censored, " << errors
        << " errored of " << samples.size() << " specimens\n";
  });

  // --- fit-deg ---------------------------------------------------------------
  auto* fitdeg = app.add_subcommand(
      "fit-deg", "Calibrate the power law from exposure observations CSV");
  std::string obs_path;
  detail::add_common(fitdeg, st);
  fitdeg->add_option("--obs", obs_path, "CSV with columns T_days,frac_increase")
      ->required();
  fitdeg->callback([&]() {
    RunConfig cfg = st.load();
    const auto obs = load_observations_csv(obs_path);
    const PowerLawFit fit = fit_power_law(obs);
    nlohmann::ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["observations"] = obs.size();
    j["A0"] = fit.A0;
    j["m"] = fit.m;
    const auto dir = cfg.resolved_output_dir();
    write_json(j, dir / "degradation_fit.json");
    out << "A0 = " << format_double(fit.A0) << "\n"
        << "m = " << format_double(fit.m) << "\n"
        << "fit: " << (dir / "degradation_fit.json").string() << "\n";
  });

  // --- fit-weibull ------------------------------------------------------------
  auto* fitw = app.add_subcommand(
      "fit-weibull", "Weibull MLE + bootstrap KS p-value + MTTF from TTF CSV");
  std::string ttf_path;
  int bootstrap = 2000;
  std::uint64_t bootstrap_seed = 424242;
  detail::add_common(fitw, st);
  fitw->add_option("--ttf", ttf_path, "TTF CSV produced by 'mc'")->required();
  fitw->add_option("--bootstrap", bootstrap, "Bootstrap replicates (default 2000)");
  fitw->add_option("--bootstrap-seed", bootstrap_seed, "Bootstrap RNG seed");
  fitw->callback([&]() {
    RunConfig cfg = st.load();
    const auto samples = load_ttf_csv(ttf_path);
    const std::vector<double> times = uncensored_times(samples);
    WeibullFit fit = weibull_mle(times);
    fit.ks_p_value = goodness_of_fit(times, fit, bootstrap, bootstrap_seed);
    const auto dir = cfg.resolved_output_dir();
    write_json(weibull_to_json(fit, times.size(), detail::make_meta(cfg, 0.0)),
               dir / "weibull.json");
    out << "shape = " << format_double(fit.shape) << "\n"
        << "scale [days] = " << format_double(fit.scale) << "\n"
        << "MTTF [days] = " << format_double(mttf(fit)) << "\n"
        << "KS p-value = " << format_double(fit.ks_p_value) << "\n"
        << "fit: " << (dir / "weibull.json").string() << "\n";
    if (times.size() < 20)
      out << "note: " << times.size()
          << " samples is a small dataset; the p-value has low power\n";
  });

  // --- fragility ---------------------------------------------------------------
  auto* frag = app.add_subcommand("fragility",
                                  "Fitted CDF on an exposure grid (plot-ready CSV)");
  std::string fit_path;
  double frag_shape = 0.0, frag_scale = 0.0, frag_tmax = 0.0, frag_tstep = 1.0;
  detail::add_common(frag, st);
  frag->add_option("--fit", fit_path, "weibull.json produced by fit-weibull");
  frag->add_option("--shape", frag_shape, "Weibull shape (alternative to --fit)");
  frag->add_option("--scale", frag_scale, "Weibull scale in days");
  frag->add_option("--t-max", frag_tmax, "Grid end in days (default 2x scale)");
  frag->add_option("--t-step", frag_tstep, "Grid step in days (default 1)");
  frag->callback([&]() {
    RunConfig cfg = st.load();
    WeibullFit fit;
    if (!fit_path.empty()) {
      fit = weibull_from_json(load_json(fit_path));
    } else if (frag_shape > 0.0 && frag_scale > 0.0) {
      fit.shape = frag_shape;
      fit.scale = frag_scale;
    } else {
      throw ConfigError("fragility: give --fit or both --shape and --scale");
    }
    const double tmax = frag_tmax > 0.0 ? frag_tmax : 2.0 * fit.scale;
    std::vector<double> grid;
    for (double t = 0.0; t <= tmax + 1e-9; t += frag_tstep) grid.push_back(t);
    const FragilityCurve curve = fragility_curve(fit, grid);
    const auto dir = cfg.resolved_output_dir();
    write_fragility_csv(curve, detail::make_meta(cfg, 0.0), dir / "fragility.csv");
    out << "fragility: " << (dir / "fragility.csv").string() << "\n";
  });

  // --- transmissibility -----------------------------------------------------
  auto* trans = app.add_subcommand(
      "transmissibility", "Transmissibility curve of a recorded run");
  std::string record_path;
  int nperseg = 4096;
  detail::add_common(trans, st);
  trans->add_option("--record", record_path, "record.csv produced by simulate")
      ->required();
  trans->add_option("--nperseg", nperseg, "Welch window length (default 4096)");
  trans->callback([&]() {
    RunConfig cfg = st.load();
    const SimulationRecord rec = load_record_csv(record_path);
    const TransmissibilityCurve curve = transmissibility_curve(rec, nperseg);
    const auto dir = cfg.resolved_output_dir();
    write_transmissibility_csv(curve, rec.meta, dir / "transmissibility.csv");
    out << "transmissibility: " << (dir / "transmissibility.csv").string() << "\n";
  });

  // --- gen-motion ----------------------------------------------------------
  auto* gen = app.add_subcommand("gen-motion",
                                 "Synthesize a filtered-white-noise ground motion");
  std::string motion_out;
  detail::add_common(gen, st);
  gen->add_option("--out", motion_out, "Output CSV (default <out-dir>/motion.csv)");
  double g_s0 = -1.0, g_omega = -1.0, g_zeta = -1.0, g_dur = -1.0, g_dt = -1.0;
  double g_rise = -1.0, g_plateau = -1.0, g_decay = -1.0;
  std::uint64_t g_seed = 0;
  bool g_seed_set = false;
  gen->add_option("--s0", g_s0, "Spectral intensity S0 (m^2/s^3)");
  gen->add_option("--omega-g-hz", g_omega, "Filter frequency in Hz");
  gen->add_option("--zeta-g", g_zeta, "Filter damping ratio");
  gen->add_option("--duration", g_dur, "Record duration in s");
  gen->add_option("--dt", g_dt, "Sample step in s");
  gen->add_option("--rise", g_rise, "Envelope rise time in s");
  gen->add_option("--plateau", g_plateau, "Envelope plateau in s");
  gen->add_option("--decay", g_decay, "Envelope decay in s");
  gen->add_option("--motion-seed", g_seed, "Synthesis seed")
      ->each([&g_seed_set](const std::string&) { g_seed_set = true; });
  gen->callback([&]() {
    RunConfig cfg = st.load();
    if (g_s0 >= 0.0) cfg.motion_s0 = g_s0;
    if (g_omega > 0.0) cfg.motion_omega_g_hz = g_omega;
    if (g_zeta > 0.0) cfg.motion_zeta_g = g_zeta;
    if (g_dur > 0.0) cfg.motion_duration = g_dur;
    if (g_dt > 0.0) cfg.motion_dt = g_dt;
    if (g_rise >= 0.0) cfg.envelope_rise = g_rise;
    if (g_plateau >= 0.0) cfg.envelope_plateau = g_plateau;
    if (g_decay >= 0.0) cfg.envelope_decay = g_decay;
    if (g_seed_set) cfg.motion_seed = g_seed;
    const GroundMotion motion = generate_kanai_tajimi(cfg.motion_spec());
    const std::filesystem::path path =
        motion_out.empty() ? cfg.resolved_output_dir() / "motion.csv"
                           : std::filesystem::path(motion_out);
    write_motion_csv(motion, path);
    out << "motion: " << path.string() << " (" << motion.samples.size()
        << " samples, peak " << format_double(motion.peak()) << " m/s^2)\n";
  });

  // ---------------------------------------------------------------------------
  std::reverse(args.begin(), args.end());  // CLI11 vector parse order
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << "\n";
    return 4;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return 5;
  } catch (const InstabilityError& e) {
    err << "instability: " << e.what() << "\n";
    return 6;
  }
  return 0;
}

}  // namespace vrths
