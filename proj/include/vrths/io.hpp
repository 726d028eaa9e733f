#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "vrths/engine.hpp"
#include "vrths/errors.hpp"
#include "vrths/metrics.hpp"
#include "vrths/reliability.hpp"
#include "vrths/weibull.hpp"

namespace vrths {

inline constexpr int kSchemaVersion = 1;

// Shortest representation that round-trips exactly.
inline std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace detail {

inline double parse_double(std::string_view token, const std::string& path,
                           std::size_t line) {
  double v = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (*(end - 1) == ' ' || *(end - 1) == '\t' || *(end - 1) == '\r'))
    --end;
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end)
    throw IoError(path + ":" + std::to_string(line) + ": not a number: '" +
                  std::string(token) + "'");
  return v;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

inline std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  return out;
}

inline std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  return in;
}

inline void write_meta_comments(std::ostream& out, const RecordMeta& meta) {
  out << "# schema_version=" << kSchemaVersion << "\n";
  if (!meta.config_hash.empty()) out << "# config_hash=" << meta.config_hash << "\n";
  out << "# seed=" << meta.seed << "\n";
  out << "# exposure_days=" << format_double(meta.exposure_days) << "\n";
  if (!meta.motion_label.empty()) out << "# motion=" << meta.motion_label << "\n";
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Ground motion CSV: comment lines, then "time_s,accel_ms2" rows with constant
// spacing. A single-column file is accepted when a "# dt=<s>" comment is
// present.

inline void write_motion_csv(const GroundMotion& motion,
                             const std::filesystem::path& path) {
  auto out = detail::open_out(path);
  out << "# schema_version=" << kSchemaVersion << "\n";
  if (!motion.label.empty()) out << "# label=" << motion.label << "\n";
  out << "# dt=" << format_double(motion.dt) << "\n";
  out << "time_s,accel_ms2\n";
  for (std::size_t i = 0; i < motion.samples.size(); ++i)
    out << format_double(static_cast<double>(i) * motion.dt) << ","
        << format_double(motion.samples[i]) << "\n";
}

inline GroundMotion load_ground_motion_csv(const std::filesystem::path& path) {
  auto in = detail::open_in(path);
  GroundMotion motion;
  motion.dt = 0.0;
  double header_dt = 0.0;
  std::vector<double> times;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string_view sv(line);
      sv.remove_prefix(1);
      while (!sv.empty() && sv.front() == ' ') sv.remove_prefix(1);
      const auto eq = sv.find('=');
      if (eq == std::string_view::npos) continue;
      if (sv.substr(0, eq) == "dt")
        header_dt = detail::parse_double(sv.substr(eq + 1), path.string(), lineno);
      else if (sv.substr(0, eq) == "label")
        motion.label = std::string(sv.substr(eq + 1));
      continue;
    }
    const auto fields = detail::split_csv(line);
    if (fields.size() == 2 && lineno <= 16 && times.empty() &&
        motion.samples.empty() &&
        (fields[0] == "time_s" || fields[0] == "time"))
      continue;  // header row
    if (fields.size() == 1) {
      motion.samples.push_back(detail::parse_double(fields[0], path.string(), lineno));
    } else if (fields.size() == 2) {
      times.push_back(detail::parse_double(fields[0], path.string(), lineno));
      motion.samples.push_back(detail::parse_double(fields[1], path.string(), lineno));
    } else {
      throw IoError(path.string() + ":" + std::to_string(lineno) +
                    ": expected 1 or 2 columns, got " + std::to_string(fields.size()));
    }
  }
  if (motion.samples.empty()) throw IoError(path.string() + ": no samples");

  if (!times.empty()) {
    if (times.size() != motion.samples.size())
      throw IoError(path.string() + ": mixed 1- and 2-column rows");
    if (times.size() < 2) {
      if (!(header_dt > 0.0))
        throw IoError(path.string() + ": single sample needs a '# dt=' header");
      motion.dt = header_dt;
    } else {
      motion.dt = times[1] - times[0];
      if (!(motion.dt > 0.0))
        throw IoError(path.string() + ":2: time column must increase");
      for (std::size_t i = 1; i < times.size(); ++i) {
        const double expected = times[0] + static_cast<double>(i) * motion.dt;
        if (std::abs(times[i] - expected) >
            1e-6 * motion.dt + 1e-12 * std::abs(expected)) {
          // Data rows follow the comment/header preamble; recover the file line.
          throw IoError(path.string() + ": non-uniform time spacing at sample " +
                        std::to_string(i + 1) + " (t=" + format_double(times[i]) +
                        ", expected " + format_double(expected) + ")");
        }
      }
    }
  } else {
    if (!(header_dt > 0.0))
      throw IoError(path.string() +
                    ": one-column format requires a '# dt=<seconds>' header line");
    motion.dt = header_dt;
  }
  motion.validate();
  return motion;
}

// ---------------------------------------------------------------------------
// Simulation record CSV.

inline void write_record_csv(const SimulationRecord& rec,
                             const std::filesystem::path& path) {
  auto out = detail::open_out(path);
  detail::write_meta_comments(out, rec.meta);
  out << "# dt=" << format_double(rec.dt) << "\n";
  out << "time_s";
  for (const auto& l : rec.dof_labels) out << ",disp_" << l << "_m";
  out << ",accel_ground_ms2";
  for (const auto& l : rec.dof_labels) out << ",accel_abs_" << l << "_ms2";
  out << ",command_m,measured_m,force_true_N,force_estimate_N,force_load_cell_N,"
         "force_applied_N,tracking_error_m\n";
  for (std::size_t i = 0; i < rec.size(); ++i) {
    out << format_double(rec.time[i]);
    for (const auto& ch : rec.rel_disp) out << "," << format_double(ch[i]);
    out << "," << format_double(rec.ground_accel[i]);
    for (const auto& ch : rec.abs_accel) out << "," << format_double(ch[i]);
    out << "," << format_double(rec.command[i]) << "," << format_double(rec.measured[i])
        << "," << format_double(rec.force_true[i]) << ","
        << format_double(rec.force_estimate[i]) << ","
        << format_double(rec.force_load_cell[i]) << ","
        << format_double(rec.force_applied[i]) << ","
        << format_double(rec.tracking_error[i]) << "\n";
  }
}

inline SimulationRecord load_record_csv(const std::filesystem::path& path) {
  auto in = detail::open_in(path);
  SimulationRecord rec;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  std::size_t ndof = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      // Comment metadata has the form "# key=value"; match keys at the start
      // only, since values (e.g. motion labels) may contain '=' themselves.
      std::string_view sv(line);
      sv.remove_prefix(1);
      while (!sv.empty() && sv.front() == ' ') sv.remove_prefix(1);
      const auto eq = sv.find('=');
      if (eq == std::string_view::npos) continue;
      const std::string_view key = sv.substr(0, eq);
      const std::string_view value = sv.substr(eq + 1);
      if (key == "dt")
        rec.dt = detail::parse_double(value, path.string(), lineno);
      else if (key == "config_hash")
        rec.meta.config_hash = std::string(value);
      else if (key == "exposure_days")
        rec.meta.exposure_days = detail::parse_double(value, path.string(), lineno);
      else if (key == "motion")
        rec.meta.motion_label = std::string(value);
      else if (key == "seed") {
        unsigned long long s = 0;
        std::from_chars(value.data(), value.data() + value.size(), s);
        rec.meta.seed = s;
      }
      continue;
    }
    const auto fields = detail::split_csv(line);
    if (!header_seen) {
      header_seen = true;
      for (const auto& f : fields) {
        std::string name(f);
        if (name.rfind("disp_", 0) == 0 && name.size() > 7)
          rec.dof_labels.push_back(name.substr(5, name.size() - 7));
      }
      ndof = rec.dof_labels.size();
      if (fields.size() != 2 * ndof + 9)
        throw IoError(path.string() + ": unrecognized record header");
      rec.rel_disp.assign(ndof, {});
      rec.abs_accel.assign(ndof, {});
      continue;
    }
    if (fields.size() != 2 * ndof + 9)
      throw IoError(path.string() + ":" + std::to_string(lineno) +
                    ": wrong column count");
    std::size_t c = 0;
    auto next = [&]() { return detail::parse_double(fields[c++], path.string(), lineno); };
    rec.time.push_back(next());
    for (std::size_t d = 0; d < ndof; ++d) rec.rel_disp[d].push_back(next());
    rec.ground_accel.push_back(next());
    for (std::size_t d = 0; d < ndof; ++d) rec.abs_accel[d].push_back(next());
    rec.command.push_back(next());
    rec.measured.push_back(next());
    rec.force_true.push_back(next());
    rec.force_estimate.push_back(next());
    rec.force_load_cell.push_back(next());
    rec.force_applied.push_back(next());
    rec.tracking_error.push_back(next());
  }
  if (!header_seen) throw IoError(path.string() + ": empty record file");
  if (rec.dt == 0.0 && rec.time.size() >= 2) rec.dt = rec.time[1] - rec.time[0];
  return rec;
}

// ---------------------------------------------------------------------------
// Metrics / fit JSON and the remaining plot-ready CSVs.

inline nlohmann::ordered_json metrics_to_json(const MetricsReport& m,
                                              const TrackingReport& tracking,
                                              const RecordMeta& meta) {
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["config_hash"] = meta.config_hash;
  j["seed"] = meta.seed;
  j["exposure_days"] = meta.exposure_days;
  j["metrics"]["drift_pct"] = m.drift_pct;
  j["metrics"]["top_accel_g"] = m.top_accel_g;
  j["metrics"]["base_shear_N"] = m.base_shear;
  j["metrics"]["max_displacement_m"] = m.max_displacement;
  j["metrics"]["max_base_displacement_m"] = m.max_base_displacement;
  j["violated"] = m.violated;
  j["tracking"]["nrms_error_pct"] = tracking.nrms_error_pct;
  j["tracking"]["peak_error_m"] = tracking.peak_error;
  j["tracking"]["peak_error_pct"] = tracking.peak_error_pct;
  return j;
}

inline MetricsReport metrics_from_json(const nlohmann::json& j) {
  MetricsReport m;
  m.drift_pct = j.at("metrics").at("drift_pct").get<double>();
  m.top_accel_g = j.at("metrics").at("top_accel_g").get<double>();
  m.base_shear = j.at("metrics").at("base_shear_N").get<double>();
  m.max_displacement = j.at("metrics").at("max_displacement_m").get<double>();
  m.max_base_displacement = j.at("metrics").at("max_base_displacement_m").get<double>();
  m.violated = j.at("violated").get<std::vector<std::string>>();
  return m;
}

inline void write_json(const nlohmann::ordered_json& j,
                       const std::filesystem::path& path) {
  auto out = detail::open_out(path);
  out << j.dump(2) << "\n";
}

inline nlohmann::json load_json(const std::filesystem::path& path) {
  auto in = detail::open_in(path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  return j;
}

inline nlohmann::ordered_json weibull_to_json(const WeibullFit& fit,
                                              std::size_t sample_count,
                                              const RecordMeta& meta) {
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["config_hash"] = meta.config_hash;
  j["seed"] = meta.seed;
  j["samples"] = sample_count;
  j["shape"] = fit.shape;
  j["scale_days"] = fit.scale;
  j["log_likelihood"] = fit.log_likelihood;
  if (std::isfinite(fit.ks_p_value)) j["ks_p_value"] = fit.ks_p_value;
  j["mttf_days"] = mttf(fit);
  return j;
}

inline WeibullFit weibull_from_json(const nlohmann::json& j) {
  WeibullFit fit;
  fit.shape = j.at("shape").get<double>();
  fit.scale = j.at("scale_days").get<double>();
  if (j.contains("log_likelihood")) fit.log_likelihood = j["log_likelihood"].get<double>();
  if (j.contains("ks_p_value")) fit.ks_p_value = j["ks_p_value"].get<double>();
  return fit;
}

inline void write_ttf_csv(const std::vector<TTFSample>& samples,
                          const RecordMeta& meta,
                          const std::filesystem::path& path) {
  auto out = detail::open_out(path);
  detail::write_meta_comments(out, meta);
  out << "specimen_id,tf_days,censored,violating_metric,error\n";
  for (const auto& s : samples) {
    out << s.specimen_id << ",";
    if (s.censored)
      out << "";
    else if (std::isfinite(s.tf_days))
      out << format_double(s.tf_days);
    out << "," << (s.censored ? 1 : 0) << "," << s.violating_metric << "," << s.error
        << "\n";
  }
}

inline std::vector<TTFSample> load_ttf_csv(const std::filesystem::path& path) {
  auto in = detail::open_in(path);
  std::vector<TTFSample> samples;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    const auto fields = detail::split_csv(line);
    if (fields.size() != 5)
      throw IoError(path.string() + ":" + std::to_string(lineno) +
                    ": expected 5 columns");
    TTFSample s;
    s.specimen_id =
        static_cast<int>(detail::parse_double(fields[0], path.string(), lineno));
    s.censored = fields[2] == "1";
    if (!s.censored && !fields[1].empty())
      s.tf_days = detail::parse_double(fields[1], path.string(), lineno);
    s.violating_metric = std::string(fields[3]);
    s.error = std::string(fields[4]);
    samples.push_back(std::move(s));
  }
  if (samples.empty()) throw IoError(path.string() + ": no samples");
  return samples;
}

inline void write_fragility_csv(const FragilityCurve& curve, const RecordMeta& meta,
                                const std::filesystem::path& path) {
  auto out = detail::open_out(path);
  detail::write_meta_comments(out, meta);
  out << "t_days,probability\n";
  for (std::size_t i = 0; i < curve.days.size(); ++i)
    out << format_double(curve.days[i]) << "," << format_double(curve.probability[i])
        << "\n";
}

inline void write_transmissibility_csv(const TransmissibilityCurve& curve,
                                       const RecordMeta& meta,
                                       const std::filesystem::path& path) {
  auto out = detail::open_out(path);
  detail::write_meta_comments(out, meta);
  out << "# smoothing=" << curve.smoothing << "\n";
  out << "frequency_hz,ratio,ground_psd\n";
  for (std::size_t i = 0; i < curve.freq_hz.size(); ++i)
    out << format_double(curve.freq_hz[i]) << "," << format_double(curve.ratio[i])
        << "," << format_double(curve.ground_psd[i]) << "\n";
}

inline std::vector<DegObservation> load_observations_csv(
    const std::filesystem::path& path) {
  auto in = detail::open_in(path);
  std::vector<DegObservation> obs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto fields = detail::split_csv(line);
    if (fields.size() != 2)
      throw IoError(path.string() + ":" + std::to_string(lineno) +
                    ": expected 'T_days,frac_increase'");
    if (lineno == 1 && (fields[0] == "T_days" || fields[0] == "t_days")) continue;
    obs.push_back({detail::parse_double(fields[0], path.string(), lineno),
                   detail::parse_double(fields[1], path.string(), lineno)});
  }
  if (obs.empty()) throw IoError(path.string() + ": no observations");
  return obs;
}

}  // namespace vrths
