#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vrths/errors.hpp"
#include "vrths/io.hpp"
#include "vrths/reliability.hpp"

namespace vrths {

// Flat, sectioned key-value configuration. Every field has a shipped default
// (the calibrated desk-scale scenario); a config file only overrides what it
// names. JSON (object of section objects) is accepted as an alternative
// carrier for the same keys.
struct RunConfig {
  // [building]
  std::vector<double> masses{600.0, 480.0, 480.0, 479.0};
  std::vector<double> story_stiffnesses{2.0e6, 2.0e6, 2.0e6};
  std::string damping_kind = "modal";  // "modal" | "rayleigh"
  std::vector<double> damping_ratios{0.02, 0.02};
  std::vector<int> damping_modes{1, 3};
  double rayleigh_a0 = 0.0;
  double rayleigh_a1 = 0.0;
  double story_height = 3.0;
  double total_weight = 2.0e4;

  // [isolator]
  double iso_alpha = 1.15e4;  // 0.25 * nominal k0
  double iso_A_bw = 1.0;
  double iso_beta = 50.0;
  double iso_gamma = 50.0;
  double iso_n = 1.0;

  // [actuator] — poles at damping 0.7 / 10 Hz pair plus a 25 Hz real pole
  double act_a2 = 0.0, act_a1 = 0.0, act_a0 = 0.0, act_b0 = 0.0;
  double act_cf = 0.0;

  // [load_cell]
  double plate_mass = 50.0;
  double noise_std = 0.0;
  std::uint64_t load_cell_seed = 99;

  // [controller]
  double kp = 1.2;
  double ki = 60.0;
  double k_ff = 1.0;
  double ff_zero_hz = 4.5;
  double ff_pole_hz = 40.0;
  double integral_limit = 0.5;

  // [engine]
  double engine_dt = 1.0 / 1024.0;
  int exchange_delay_steps = 1;
  std::string plant_mode = "coupled";           // "coupled" | "ideal"
  std::string accel_estimate = "second_difference";  // | "oracle"
  double instability_limit = 1.0e6;
  bool pace_realtime = false;

  // [degradation]
  double deg_k0 = 4.60e4;
  double deg_A0 = 3.39e-5;
  double deg_m = 2.37;
  double cov_k0 = 0.10;
  double cov_A0 = 0.05;
  double cov_m = 0.05;

  // [thresholds]
  Thresholds thresholds{};

  // [campaign]
  int specimens = 12;
  double t_step_days = 1.0;
  double t_max_days = 200.0;
  std::uint64_t master_seed = 2026;
  int max_parallel = 0;

  // [motion]
  std::string motion_source = "synthetic";  // "synthetic" | "csv"
  std::string motion_path;
  double motion_s0 = 8.5e-3;
  double motion_omega_g_hz = 1.5;
  double motion_zeta_g = 0.2;
  double motion_duration = 30.0;
  double motion_dt = 1.0 / 1024.0;
  double envelope_rise = 4.0;
  double envelope_plateau = 16.0;
  double envelope_decay = 10.0;
  std::uint64_t motion_seed = 7;

  // [output]
  std::string output_dir;

  RunConfig() {
    const ActuatorModel act = ActuatorModel::place_poles(10.0, 0.7, 25.0);
    act_a2 = act.a2;
    act_a1 = act.a1;
    act_a0 = act.a0;
    act_b0 = act.b0;
  }

  BuildingModel building() const {
    BuildingModel b;
    b.masses = masses;
    b.story_stiffnesses = story_stiffnesses;
    if (damping_kind == "modal") {
      if (damping_ratios.size() != 2 || damping_modes.size() != 2)
        throw ConfigError("building: modal damping needs two ratios and two modes");
      b.damping = ModalDamping{{damping_ratios[0], damping_ratios[1]},
                               {damping_modes[0], damping_modes[1]}};
    } else if (damping_kind == "rayleigh") {
      b.damping = RayleighCoefficients{rayleigh_a0, rayleigh_a1};
    } else {
      throw ConfigError("building: damping must be 'modal' or 'rayleigh'");
    }
    b.story_height = story_height;
    b.total_weight = total_weight;
    return b;
  }

  DegradationModel degradation() const { return {deg_k0, deg_A0, deg_m}; }

  BoucWenIsolator isolator() const {
    BoucWenIsolator iso;
    iso.k = deg_k0;
    iso.alpha = iso_alpha;
    iso.A_bw = iso_A_bw;
    iso.beta = iso_beta;
    iso.gamma = iso_gamma;
    iso.n = iso_n;
    return iso;
  }

  ActuatorModel actuator() const {
    ActuatorModel act;
    act.a2 = act_a2;
    act.a1 = act_a1;
    act.a0 = act_a0;
    act.b0 = act_b0;
    act.c_f = act_cf;
    return act;
  }

  LoadCellModel load_cell() const { return {plate_mass, noise_std, load_cell_seed}; }

  ControllerConfig controller() const {
    ControllerConfig c;
    c.kp = kp;
    c.ki = ki;
    c.k_ff = k_ff;
    c.ff_zero = 2.0 * std::numbers::pi * ff_zero_hz;
    c.ff_pole = 2.0 * std::numbers::pi * ff_pole_hz;
    c.sample_dt = engine_dt;
    c.integral_limit = integral_limit;
    return c;
  }

  EngineConfig engine() const {
    EngineConfig e;
    e.dt = engine_dt;
    e.exchange_delay_steps = exchange_delay_steps;
    if (plant_mode == "coupled")
      e.plant_mode = PlantMode::coupled;
    else if (plant_mode == "ideal")
      e.plant_mode = PlantMode::ideal;
    else
      throw ConfigError("engine: plant_mode must be 'coupled' or 'ideal'");
    if (accel_estimate == "second_difference")
      e.accel_estimate = AccelEstimate::second_difference;
    else if (accel_estimate == "oracle")
      e.accel_estimate = AccelEstimate::oracle;
    else
      throw ConfigError("engine: accel_estimate must be 'second_difference' or 'oracle'");
    e.instability_limit = instability_limit;
    e.pace_realtime = pace_realtime;
    return e;
  }

  KanaiTajimiSpec motion_spec() const {
    KanaiTajimiSpec spec;
    spec.S0 = motion_s0;
    spec.omega_g = 2.0 * std::numbers::pi * motion_omega_g_hz;
    spec.zeta_g = motion_zeta_g;
    spec.duration = motion_duration;
    spec.dt = motion_dt;
    spec.envelope = {envelope_rise, envelope_plateau, envelope_decay};
    spec.seed = motion_seed;
    return spec;
  }

  GroundMotion motion() const {
    if (motion_source == "synthetic") return generate_kanai_tajimi(motion_spec());
    if (motion_source == "csv") {
      if (motion_path.empty())
        throw ConfigError("motion: source=csv requires a path");
      if (!std::filesystem::exists(motion_path))
        throw ConfigError("motion: file does not exist: " + motion_path);
      return load_ground_motion_csv(motion_path);
    }
    throw ConfigError("motion: source must be 'synthetic' or 'csv'");
  }

  ScenarioBundle scenario() const {
    ScenarioBundle s;
    s.building = building();
    s.isolator = isolator();
    s.actuator = actuator();
    s.load_cell = load_cell();
    s.controller = controller();
    s.motion = motion();
    s.thresholds = thresholds;
    s.engine = engine();
    s.validate();
    return s;
  }

  CampaignConfig campaign() const {
    CampaignConfig c;
    c.specimens = specimens;
    c.t_step_days = t_step_days;
    c.t_max_days = t_max_days;
    c.master_seed = master_seed;
    c.cov_k0 = cov_k0;
    c.cov_A0 = cov_A0;
    c.cov_m = cov_m;
    c.nominal_degradation = degradation();
    c.scenario = scenario();
    c.max_parallel = max_parallel;
    return c;
  }

  std::filesystem::path resolved_output_dir() const {
    if (!output_dir.empty()) return output_dir;
    if (const char* env = std::getenv("VRTHS_OUT_DIR"); env && *env) return env;
    return "out";
  }

  // Canonical serialization of every physics-relevant field; the output
  // directory is deliberately excluded so relocated runs hash identically.
  std::string canonical() const;
  std::string hash() const;

  // Validates every section by constructing the module objects.
  void validate() const {
    building().validate();
    isolator().validate();
    actuator().validate();
    load_cell().validate();
    controller().validate();
    engine().validate();
    degradation().validate();
    thresholds.validate();
    if (specimens < 1) throw ConfigError("campaign: specimens must be >= 1");
    if (!(t_step_days > 0.0)) throw ConfigError("campaign: t_step_days must be > 0");
    if (!(t_max_days >= t_step_days))
      throw ConfigError("campaign: t_max_days must be >= t_step_days");
    if (motion_source == "synthetic") {
      motion_spec().validate();
    } else if (motion_source == "csv") {
      if (motion_path.empty() || !std::filesystem::exists(motion_path))
        throw ConfigError("motion: csv source requires an existing file, got '" +
                          motion_path + "'");
    } else {
      throw ConfigError("motion: source must be 'synthetic' or 'csv'");
    }
    if (cov_k0 < 0 || cov_A0 < 0 || cov_m < 0)
      throw ConfigError("degradation: coefficients of variation must be >= 0");
  }
};

namespace detail {

inline std::string join_doubles(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += format_double(v[i]);
  }
  return s;
}

inline std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

inline std::vector<double> parse_double_list(const std::string& value,
                                             const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      while (used < tok.size() && std::isspace(static_cast<unsigned char>(tok[used])))
        ++used;
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ConfigError("config: bad number '" + tok + "' in " + key);
    }
  }
  if (out.empty()) throw ConfigError("config: empty list for " + key);
  return out;
}

inline double parse_one_double(const std::string& value, const std::string& key) {
  const auto v = parse_double_list(value, key);
  if (v.size() != 1) throw ConfigError("config: expected one number for " + key);
  return v[0];
}

inline bool parse_bool(const std::string& value, const std::string& key) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("config: bad boolean '" + value + "' for " + key);
}

inline std::uint64_t parse_u64(const std::string& value, const std::string& key) {
  try {
    return std::stoull(value);
  } catch (const std::exception&) {
    throw ConfigError("config: bad unsigned integer '" + value + "' for " + key);
  }
}

using SectionMap = std::map<std::string, std::map<std::string, std::string>>;

inline std::string trim(std::string s) {
  const auto notspace = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
  s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
  return s;
}

inline SectionMap parse_ini_text(const std::string& text, const std::string& source) {
  SectionMap sections;
  std::istringstream in(text);
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(source + ":" + std::to_string(lineno) +
                          ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source + ":" + std::to_string(lineno) +
                        ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty())
      throw ConfigError(source + ":" + std::to_string(lineno) +
                        ": key outside of any [section]");
    sections[section][key] = value;
  }
  return sections;
}

inline SectionMap parse_json_config(const std::string& text, const std::string& source) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(source + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError(source + ": top level must be an object");
  SectionMap sections;
  for (const auto& [section, body] : j.items()) {
    if (!body.is_object())
      throw ConfigError(source + ": section '" + section + "' must be an object");
    for (const auto& [key, value] : body.items()) {
      std::string s;
      if (value.is_string()) {
        s = value.get<std::string>();
      } else if (value.is_boolean()) {
        s = value.get<bool>() ? "true" : "false";
      } else if (value.is_array()) {
        for (std::size_t i = 0; i < value.size(); ++i) {
          if (i) s += ',';
          s += value[i].dump();
        }
      } else {
        s = value.dump();
      }
      sections[section][key] = s;
    }
  }
  return sections;
}

}  // namespace detail

inline void apply_config_sections(RunConfig& cfg, const detail::SectionMap& sections) {
  using detail::parse_bool;
  using detail::parse_double_list;
  using detail::parse_one_double;
  using detail::parse_u64;

  for (const auto& [section, kv] : sections) {
    for (const auto& [key, value] : kv) {
      const std::string where = "[" + section + "] " + key;
      auto num = [&]() { return parse_one_double(value, where); };
      if (section == "building") {
        if (key == "masses") cfg.masses = parse_double_list(value, where);
        else if (key == "story_stiffnesses") cfg.story_stiffnesses = parse_double_list(value, where);
        else if (key == "damping") cfg.damping_kind = value;
        else if (key == "damping_ratios") cfg.damping_ratios = parse_double_list(value, where);
        else if (key == "damping_modes") {
          cfg.damping_modes.clear();
          for (double d : parse_double_list(value, where))
            cfg.damping_modes.push_back(static_cast<int>(d));
        }
        else if (key == "rayleigh_a0") cfg.rayleigh_a0 = num();
        else if (key == "rayleigh_a1") cfg.rayleigh_a1 = num();
        else if (key == "story_height") cfg.story_height = num();
        else if (key == "total_weight") cfg.total_weight = num();
        else throw ConfigError("config: unknown key " + where);
      } else if (section == "isolator") {
        if (key == "alpha") cfg.iso_alpha = num();
        else if (key == "a_bw") cfg.iso_A_bw = num();
        else if (key == "beta") cfg.iso_beta = num();
        else if (key == "gamma") cfg.iso_gamma = num();
        else if (key == "n") cfg.iso_n = num();
        else throw ConfigError("config: unknown key " + where);
      } else if (section == "actuator") {
        if (key == "a2") cfg.act_a2 = num();
        else if (key == "a1") cfg.act_a1 = num();
        else if (key == "a0") cfg.act_a0 = num();
        else if (key == "b0") cfg.act_b0 = num();
        else if (key == "c_f") cfg.act_cf = num();
        else throw ConfigError("config: unknown key " + where);
      } else if (section == "load_cell") {
        if (key == "plate_mass") cfg.plate_mass = num();
        else if (key == "noise_std") cfg.noise_std = num();
        else if (key == "seed") cfg.load_cell_seed = parse_u64(value, where);
        else throw ConfigError("config: unknown key " + where);
      } else if (section == "controller") {
        if (key == "kp") cfg.kp = num();
        else if (key == "ki") cfg.ki = num();
        else if (key == "k_ff") cfg.k_ff = num();
        else if (key == "ff_zero_hz") cfg.ff_zero_hz = num();
        else if (key == "ff_pole_hz") cfg.ff_pole_hz = num();
        else if (key == "integral_limit") cfg.integral_limit = num();
        else throw ConfigError("config: unknown key " + where);
      } else if (section == "engine") {
        if (key == "dt") cfg.engine_dt = num();
        else if (key == "exchange_delay_steps") cfg.exchange_delay_steps = static_cast<int>(num());
        else if (key == "plant_mode") cfg.plant_mode = value;
        else if (key == "accel_estimate") cfg.accel_estimate = value;
        else if (key == "instability_limit") cfg.instability_limit = num();
        else if (key == "pace_realtime") cfg.pace_realtime = parse_bool(value, where);
        else throw ConfigError("config: unknown key " + where);
      } else if (section == "degradation") {
        if (key == "k0") cfg.deg_k0 = num();
        else if (key == "a0") cfg.deg_A0 = num();
        else if (key == "m") cfg.deg_m = num();
        else if (key == "cov_k0") cfg.cov_k0 = num();
        else if (key == "cov_a0") cfg.cov_A0 = num();
        else if (key == "cov_m") cfg.cov_m = num();
        else throw ConfigError("config: unknown key " + where);
      } else if (section == "thresholds") {
        if (key == "max_drift_pct") cfg.thresholds.max_drift_pct = num();
        else if (key == "max_top_accel_g") cfg.thresholds.max_top_accel_g = num();
        else if (key == "max_base_shear_n") cfg.thresholds.max_base_shear = num();
        else if (key == "max_displacement_m") cfg.thresholds.max_displacement = num();
        else if (key == "max_base_displacement_m") cfg.thresholds.max_base_displacement = num();
        else throw ConfigError("config: unknown key " + where);
      } else if (section == "campaign") {
        if (key == "specimens") cfg.specimens = static_cast<int>(num());
        else if (key == "t_step_days") cfg.t_step_days = num();
        else if (key == "t_max_days") cfg.t_max_days = num();
        else if (key == "master_seed") cfg.master_seed = parse_u64(value, where);
        else if (key == "max_parallel") cfg.max_parallel = static_cast<int>(num());
        else throw ConfigError("config: unknown key " + where);
      } else if (section == "motion") {
        if (key == "source") cfg.motion_source = value;
        else if (key == "path") cfg.motion_path = value;
        else if (key == "s0") cfg.motion_s0 = num();
        else if (key == "omega_g_hz") cfg.motion_omega_g_hz = num();
        else if (key == "zeta_g") cfg.motion_zeta_g = num();
        else if (key == "duration") cfg.motion_duration = num();
        else if (key == "dt") cfg.motion_dt = num();
        else if (key == "envelope_rise") cfg.envelope_rise = num();
        else if (key == "envelope_plateau") cfg.envelope_plateau = num();
        else if (key == "envelope_decay") cfg.envelope_decay = num();
        else if (key == "seed") cfg.motion_seed = parse_u64(value, where);
        else throw ConfigError("config: unknown key " + where);
      } else if (section == "output") {
        if (key == "dir") cfg.output_dir = value;
        else throw ConfigError("config: unknown key " + where);
      } else {
        throw ConfigError("config: unknown section [" + section + "]");
      }
    }
  }
}

inline RunConfig load_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path))
    throw ConfigError("config: file does not exist: " + path.string());
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  const auto first = text.find_first_not_of(" \t\r\n");
  detail::SectionMap sections;
  if (first != std::string::npos && text[first] == '{')
    sections = detail::parse_json_config(text, path.string());
  else
    sections = detail::parse_ini_text(text, path.string());

  RunConfig cfg;
  apply_config_sections(cfg, sections);
  return cfg;
}

inline std::string RunConfig::canonical() const {
  std::string s;
  auto add = [&s](const std::string& key, const std::string& value) {
    s += key;
    s += '=';
    s += value;
    s += '\n';
  };
  add("building.masses", detail::join_doubles(masses));
  add("building.story_stiffnesses", detail::join_doubles(story_stiffnesses));
  add("building.damping", damping_kind);
  add("building.damping_ratios", detail::join_doubles(damping_ratios));
  add("building.damping_modes", detail::join_ints(damping_modes));
  add("building.rayleigh_a0", format_double(rayleigh_a0));
  add("building.rayleigh_a1", format_double(rayleigh_a1));
  add("building.story_height", format_double(story_height));
  add("building.total_weight", format_double(total_weight));
  add("isolator.alpha", format_double(iso_alpha));
  add("isolator.a_bw", format_double(iso_A_bw));
  add("isolator.beta", format_double(iso_beta));
  add("isolator.gamma", format_double(iso_gamma));
  add("isolator.n", format_double(iso_n));
  add("actuator.a2", format_double(act_a2));
  add("actuator.a1", format_double(act_a1));
  add("actuator.a0", format_double(act_a0));
  add("actuator.b0", format_double(act_b0));
  add("actuator.c_f", format_double(act_cf));
  add("load_cell.plate_mass", format_double(plate_mass));
  add("load_cell.noise_std", format_double(noise_std));
  add("load_cell.seed", std::to_string(load_cell_seed));
  add("controller.kp", format_double(kp));
  add("controller.ki", format_double(ki));
  add("controller.k_ff", format_double(k_ff));
  add("controller.ff_zero_hz", format_double(ff_zero_hz));
  add("controller.ff_pole_hz", format_double(ff_pole_hz));
  add("controller.integral_limit", format_double(integral_limit));
  add("engine.dt", format_double(engine_dt));
  add("engine.exchange_delay_steps", std::to_string(exchange_delay_steps));
  add("engine.plant_mode", plant_mode);
  add("engine.accel_estimate", accel_estimate);
  add("engine.instability_limit", format_double(instability_limit));
  add("engine.pace_realtime", pace_realtime ? "true" : "false");
  add("degradation.k0", format_double(deg_k0));
  add("degradation.a0", format_double(deg_A0));
  add("degradation.m", format_double(deg_m));
  add("degradation.cov_k0", format_double(cov_k0));
  add("degradation.cov_a0", format_double(cov_A0));
  add("degradation.cov_m", format_double(cov_m));
  add("thresholds.max_drift_pct", format_double(thresholds.max_drift_pct));
  add("thresholds.max_top_accel_g", format_double(thresholds.max_top_accel_g));
  add("thresholds.max_base_shear_n", format_double(thresholds.max_base_shear));
  add("thresholds.max_displacement_m", format_double(thresholds.max_displacement));
  add("thresholds.max_base_displacement_m",
      format_double(thresholds.max_base_displacement));
  add("campaign.specimens", std::to_string(specimens));
  add("campaign.t_step_days", format_double(t_step_days));
  add("campaign.t_max_days", format_double(t_max_days));
  add("campaign.master_seed", std::to_string(master_seed));
  add("motion.source", motion_source);
  add("motion.path", motion_path);
  add("motion.s0", format_double(motion_s0));
  add("motion.omega_g_hz", format_double(motion_omega_g_hz));
  add("motion.zeta_g", format_double(motion_zeta_g));
  add("motion.duration", format_double(motion_duration));
  add("motion.dt", format_double(motion_dt));
  add("motion.envelope_rise", format_double(envelope_rise));
  add("motion.envelope_plateau", format_double(envelope_plateau));
  add("motion.envelope_decay", format_double(envelope_decay));
  add("motion.seed", std::to_string(motion_seed));
  return s;
}

inline std::string RunConfig::hash() const {
  // FNV-1a 64 over the canonical dump.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  static const char* hex = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = hex[h & 0xF];
    h >>= 4;
  }
  buf[16] = '\0';
  return std::string(buf, 16);
}

}  // namespace vrths
