// SPDX-License-Identifier: Apache-2.0
#include "nrsense/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace nrs {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& key, const std::string& v) {
  if (v == "-inf") return kNegInfDb;
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return d;
  } catch (...) {
    throw std::invalid_argument("invalid value for '" + key + "': " + v);
  }
}

long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long i = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return i;
  } catch (...) {
    throw std::invalid_argument("invalid value for '" + key + "': " + v);
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("invalid value for '" + key + "': " + v);
}

}  // namespace

KvMap parse_config_text(std::istream& in) {
  KvMap kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) throw std::invalid_argument("config line " + std::to_string(lineno) +
                                                 ": empty key");
    kv[key] = val;
  }
  return kv;
}

KvMap load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
    nlohmann::json j;
    in >> j;
    if (!j.contains("config") || !j["config"].is_object())
      throw std::invalid_argument("manifest " + path + " has no 'config' object");
    KvMap kv;
    for (const auto& [k, v] : j["config"].items()) kv[k] = v.get<std::string>();
    return kv;
  }
  return parse_config_text(in);
}

void apply_overrides(KvMap& kv, std::span<const std::string> overrides) {
  for (const auto& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("override must be key=value: " + ov);
    kv[trim(ov.substr(0, eq))] = trim(ov.substr(eq + 1));
  }
}

ScenarioConfig scenario_from_kv(const KvMap& kv) {
  ScenarioConfig s;
  for (const auto& [key, val] : kv) {
    auto d = [&] { return parse_double(key, val); };
    auto i = [&] { return int(parse_int(key, val)); };

    if (key == "prs.carrier_freq_hz") s.prs.carrier_freq_hz = d();
    else if (key == "prs.scs_hz") s.prs.scs_hz = d();
    else if (key == "prs.n_subcarriers") s.prs.n_subcarriers = i();
    else if (key == "prs.comb_size") s.prs.comb_size = i();
    else if (key == "prs.n_prs_symbols") s.prs.n_prs_symbols = i();
    else if (key == "prs.period_s") s.prs.prs_period_s = d();
    else if (key == "prs.n_cpi") s.prs.n_cpi = i();
    else if (key == "prs.tx_power_dbm") s.prs.tx_power_dbm = d();
    else if (key == "prs.gold_seed") s.prs.gold_seed = std::uint32_t(parse_int(key, val));

    else if (key == "array.n_rows") s.array.n_rows = i();
    else if (key == "array.n_cols") s.array.n_cols = i();
    else if (key == "array.dh") s.array.dh = d();
    else if (key == "array.dv") s.array.dv = d();
    else if (key == "array.mech_tilt_deg") s.array.mech_tilt_deg = d();
    else if (key == "array.element_gain_dbi") s.array.element_gain_dbi = d();
    else if (key == "array.beamwidth_az_deg") s.array.beamwidth_az_deg = d();
    else if (key == "array.beamwidth_el_deg") s.array.beamwidth_el_deg = d();
    else if (key == "array.sla_db") s.array.sla_db = d();
    else if (key == "array.am_db") s.array.am_db = d();

    else if (key == "rx.architecture") s.rx_kind = rx_kind_from_string(val);

    else if (key == "scatter.n_rays") s.scatter.n_scatter = i();
    else if (key == "scatter.delay_spread_s") s.scatter.delay_spread_s = d();
    else if (key == "scatter.angle_spread_deg") s.scatter.angle_spread_deg = d();
    else if (key == "scatter.power_mean_db") s.scatter.power_mean_db = d();
    else if (key == "scatter.power_std_db") s.scatter.power_std_db = d();
    else if (key == "scatter.drop_threshold_db") s.scatter.drop_threshold_db = d();

    else if (key == "bg.n_rp") s.background.n_rp = i();
    else if (key == "bg.dist_min_m") s.background.dist_min_m = d();
    else if (key == "bg.dist_max_m") s.background.dist_max_m = d();
    else if (key == "bg.height_min_m") s.background.height_min_m = d();
    else if (key == "bg.height_max_m") s.background.height_max_m = d();
    else if (key == "bg.n_clusters") s.background.n_clusters = i();
    else if (key == "bg.delay_spread_s") s.background.delay_spread_s = d();
    else if (key == "bg.angle_spread_deg") s.background.angle_spread_deg = d();
    else if (key == "bg.shadow_std_db") s.background.shadow_std_db = d();
    else if (key == "bg.pathloss") {
      if (val == "free_space") s.background.pathloss = PathlossLaw::free_space;
      else if (val == "uma_nlos") s.background.pathloss = PathlossLaw::uma_nlos;
      else throw std::invalid_argument("invalid value for 'bg.pathloss': " + val);
    }

    else if (key == "noise.psd_dbm_hz") s.noise.noise_psd_dbm_hz = d();
    else if (key == "noise.figure_db") s.noise.noise_figure_db = d();
    else if (key == "noise.si_power_dbm") s.noise.si_power_dbm = d();
    else if (key == "noise.thermal_enabled") s.noise.thermal_enabled = parse_bool(key, val);

    else if (key == "cfar.guard_range") s.cfar.guard_range = i();
    else if (key == "cfar.guard_doppler") s.cfar.guard_doppler = i();
    else if (key == "cfar.train_range") s.cfar.train_range = i();
    else if (key == "cfar.train_doppler") s.cfar.train_doppler = i();
    else if (key == "cfar.threshold_db") s.cfar.threshold_db = d();
    else if (key == "cfar.nms_range") s.cfar.nms_range = i();
    else if (key == "cfar.nms_doppler") s.cfar.nms_doppler = i();

    else if (key == "aoa.method") s.aoa.method = aoa_method_from_string(val);
    else if (key == "aoa.fft_size") s.aoa.fft_size = i();
    else if (key == "aoa.scan_step_deg") s.aoa.scan_step_deg = d();
    else if (key == "aoa.el_min_deg") s.aoa.el_min_deg = d();
    else if (key == "aoa.el_max_deg") s.aoa.el_max_deg = d();
    else if (key == "aoa.window") s.aoa.window = window_from_string(val);

    else if (key == "rd.n_r") s.rd.n_r = i();
    else if (key == "rd.n_d") s.rd.n_d = i();
    else if (key == "rd.window_range") s.rd.range_window = window_from_string(val);
    else if (key == "rd.window_doppler") s.rd.doppler_window = window_from_string(val);
    else if (key == "rd.max_range_m") s.rd.max_range_m = d();

    else if (key == "sector.yaw_deg") {
      s.sector.yaw_deg = d();
      s.array.boresight_yaw_deg = s.sector.yaw_deg;
    } else if (key == "sector.halfwidth_deg") s.sector.halfwidth_deg = d();
    else if (key == "sector.radius_m") s.sector.radius_m = d();
    else if (key == "sector.trp_x_m") s.sector.trp_position.x = d();
    else if (key == "sector.trp_y_m") s.sector.trp_position.y = d();
    else if (key == "sector.trp_height_m") s.sector.trp_position.z = d();
    else if (key == "sector.alt_min_m") s.sector.alt_min_m = d();
    else if (key == "sector.alt_max_m") s.sector.alt_max_m = d();
    else if (key == "sector.speed_min_kmh") s.sector.speed_min_kmh = d();
    else if (key == "sector.speed_max_kmh") s.sector.speed_max_kmh = d();
    else if (key == "sector.min_dist_m") s.sector.min_dist_m = d();

    else if (key == "target.rcs_mean_dbsm") s.rcs_mean_dbsm = d();
    else if (key == "target.rcs_angular") s.rcs_angular = d();
    else if (key == "target.rcs_sigma_db") s.rcs_sigma_db = d();

    else if (key == "run.n_targets") s.n_targets = i();
    else if (key == "run.n_drops") s.n_drops = i();
    else if (key == "run.master_seed") s.master_seed = std::uint64_t(parse_int(key, val));
    else if (key == "run.association_gate_m") s.association_gate_m = d();
    else if (key == "run.workers") s.workers = i();

    else throw std::invalid_argument("unknown config key '" + key + "'");
  }
  // sector yaw applied after the loop too, in case only defaults are used
  s.array.boresight_yaw_deg = s.sector.yaw_deg;
  return s;
}

KvMap scenario_to_kv(const ScenarioConfig& s) {
  KvMap kv;
  kv["prs.carrier_freq_hz"] = fmt_double(s.prs.carrier_freq_hz);
  kv["prs.scs_hz"] = fmt_double(s.prs.scs_hz);
  kv["prs.n_subcarriers"] = std::to_string(s.prs.n_subcarriers);
  kv["prs.comb_size"] = std::to_string(s.prs.comb_size);
  kv["prs.n_prs_symbols"] = std::to_string(s.prs.n_prs_symbols);
  kv["prs.period_s"] = fmt_double(s.prs.prs_period_s);
  kv["prs.n_cpi"] = std::to_string(s.prs.n_cpi);
  kv["prs.tx_power_dbm"] = fmt_double(s.prs.tx_power_dbm);
  kv["prs.gold_seed"] = std::to_string(s.prs.gold_seed);
  kv["array.n_rows"] = std::to_string(s.array.n_rows);
  kv["array.n_cols"] = std::to_string(s.array.n_cols);
  kv["array.dh"] = fmt_double(s.array.dh);
  kv["array.dv"] = fmt_double(s.array.dv);
  kv["array.mech_tilt_deg"] = fmt_double(s.array.mech_tilt_deg);
  kv["array.element_gain_dbi"] = fmt_double(s.array.element_gain_dbi);
  kv["array.beamwidth_az_deg"] = fmt_double(s.array.beamwidth_az_deg);
  kv["array.beamwidth_el_deg"] = fmt_double(s.array.beamwidth_el_deg);
  kv["array.sla_db"] = fmt_double(s.array.sla_db);
  kv["array.am_db"] = fmt_double(s.array.am_db);
  kv["rx.architecture"] = to_string(s.rx_kind);
  kv["scatter.n_rays"] = std::to_string(s.scatter.n_scatter);
  kv["scatter.delay_spread_s"] = fmt_double(s.scatter.delay_spread_s);
  kv["scatter.angle_spread_deg"] = fmt_double(s.scatter.angle_spread_deg);
  kv["scatter.power_mean_db"] = fmt_double(s.scatter.power_mean_db);
  kv["scatter.power_std_db"] = fmt_double(s.scatter.power_std_db);
  kv["scatter.drop_threshold_db"] = fmt_double(s.scatter.drop_threshold_db);
  kv["bg.n_rp"] = std::to_string(s.background.n_rp);
  kv["bg.dist_min_m"] = fmt_double(s.background.dist_min_m);
  kv["bg.dist_max_m"] = fmt_double(s.background.dist_max_m);
  kv["bg.height_min_m"] = fmt_double(s.background.height_min_m);
  kv["bg.height_max_m"] = fmt_double(s.background.height_max_m);
  kv["bg.n_clusters"] = std::to_string(s.background.n_clusters);
  kv["bg.delay_spread_s"] = fmt_double(s.background.delay_spread_s);
  kv["bg.angle_spread_deg"] = fmt_double(s.background.angle_spread_deg);
  kv["bg.shadow_std_db"] = fmt_double(s.background.shadow_std_db);
  kv["bg.pathloss"] =
      s.background.pathloss == PathlossLaw::uma_nlos ? "uma_nlos" : "free_space";
  kv["noise.psd_dbm_hz"] = fmt_double(s.noise.noise_psd_dbm_hz);
  kv["noise.figure_db"] = fmt_double(s.noise.noise_figure_db);
  kv["noise.si_power_dbm"] = fmt_double(s.noise.si_power_dbm);
  kv["noise.thermal_enabled"] = s.noise.thermal_enabled ? "true" : "false";
  kv["cfar.guard_range"] = std::to_string(s.cfar.guard_range);
  kv["cfar.guard_doppler"] = std::to_string(s.cfar.guard_doppler);
  kv["cfar.train_range"] = std::to_string(s.cfar.train_range);
  kv["cfar.train_doppler"] = std::to_string(s.cfar.train_doppler);
  kv["cfar.threshold_db"] = fmt_double(s.cfar.threshold_db);
  kv["cfar.nms_range"] = std::to_string(s.cfar.nms_range);
  kv["cfar.nms_doppler"] = std::to_string(s.cfar.nms_doppler);
  kv["aoa.method"] = s.aoa.method == AoaConfig::Method::fft ? "fft" : "bartlett";
  kv["aoa.fft_size"] = std::to_string(s.aoa.fft_size);
  kv["aoa.scan_step_deg"] = fmt_double(s.aoa.scan_step_deg);
  kv["aoa.el_min_deg"] = fmt_double(s.aoa.el_min_deg);
  kv["aoa.el_max_deg"] = fmt_double(s.aoa.el_max_deg);
  kv["aoa.window"] = to_string(s.aoa.window);
  kv["rd.n_r"] = std::to_string(s.rd.n_r);
  kv["rd.n_d"] = std::to_string(s.rd.n_d);
  kv["rd.window_range"] = to_string(s.rd.range_window);
  kv["rd.window_doppler"] = to_string(s.rd.doppler_window);
  kv["rd.max_range_m"] = fmt_double(s.rd.max_range_m);
  kv["sector.yaw_deg"] = fmt_double(s.sector.yaw_deg);
  kv["sector.halfwidth_deg"] = fmt_double(s.sector.halfwidth_deg);
  kv["sector.radius_m"] = fmt_double(s.sector.radius_m);
  kv["sector.trp_x_m"] = fmt_double(s.sector.trp_position.x);
  kv["sector.trp_y_m"] = fmt_double(s.sector.trp_position.y);
  kv["sector.trp_height_m"] = fmt_double(s.sector.trp_position.z);
  kv["sector.alt_min_m"] = fmt_double(s.sector.alt_min_m);
  kv["sector.alt_max_m"] = fmt_double(s.sector.alt_max_m);
  kv["sector.speed_min_kmh"] = fmt_double(s.sector.speed_min_kmh);
  kv["sector.speed_max_kmh"] = fmt_double(s.sector.speed_max_kmh);
  kv["sector.min_dist_m"] = fmt_double(s.sector.min_dist_m);
  kv["target.rcs_mean_dbsm"] = fmt_double(s.rcs_mean_dbsm);
  kv["target.rcs_angular"] = fmt_double(s.rcs_angular);
  kv["target.rcs_sigma_db"] = fmt_double(s.rcs_sigma_db);
  kv["run.n_targets"] = std::to_string(s.n_targets);
  kv["run.n_drops"] = std::to_string(s.n_drops);
  kv["run.master_seed"] = std::to_string(s.master_seed);
  kv["run.association_gate_m"] = fmt_double(s.association_gate_m);
  kv["run.workers"] = std::to_string(s.workers);
  return kv;
}

}  // namespace nrs
