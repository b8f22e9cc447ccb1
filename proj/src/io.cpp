// SPDX-License-Identifier: Apache-2.0
#include "nrsense/io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace nrs {

namespace {

using json = nlohmann::ordered_json;

std::ofstream open_out(const std::string& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  return out;
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json json_num(double v) {
  // JSON has no inf/nan; fall back to strings for those
  if (std::isfinite(v)) return v;
  return num(v);
}

json percentiles_json(const Percentiles& p) {
  return json{{"p50", json_num(p.p50)}, {"p90", json_num(p.p90)}};
}

void write_f32_le(std::ofstream& out, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  const unsigned char b[4] = {static_cast<unsigned char>(bits & 0xff),
                              static_cast<unsigned char>((bits >> 8) & 0xff),
                              static_cast<unsigned char>((bits >> 16) & 0xff),
                              static_cast<unsigned char>((bits >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

}  // namespace

void write_metrics_json(const std::string& path, const AggregateMetrics& agg,
                        std::span<const DropMetrics> drops) {
  json j;
  j["pd"] = json_num(agg.pd);
  j["pfa"] = agg.pfa ? json(json_num(*agg.pfa)) : json(nullptr);
  j["ptp"] = agg.ptp ? json(json_num(*agg.ptp)) : json(nullptr);
  j["f1"] = json_num(agg.f1);
  j["total_tp"] = agg.total_tp;
  j["total_fa"] = agg.total_fa;
  j["total_fn"] = agg.total_fn;
  j["n_drops"] = drops.size();
  j["range_err_m"] = percentiles_json(agg.range_err);
  j["velocity_err_mps"] = percentiles_json(agg.velocity_err);
  j["horizontal_err_m"] = percentiles_json(agg.horizontal_err);
  j["vertical_err_m"] = percentiles_json(agg.vertical_err);
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

void write_drops_csv(const std::string& path, std::span<const DropMetrics> drops) {
  auto out = open_out(path);
  out << "drop,tp,fa,fn,gated\n";
  for (std::size_t i = 0; i < drops.size(); ++i)
    out << i << ',' << drops[i].tp << ',' << drops[i].fa << ',' << drops[i].fn << ','
        << drops[i].gated << '\n';
}

void write_errors_csv(const std::string& path, std::span<const DropMetrics> drops) {
  auto out = open_out(path);
  out << "drop,range_err_m,velocity_err_mps,horizontal_err_m,vertical_err_m\n";
  for (std::size_t i = 0; i < drops.size(); ++i) {
    const auto& d = drops[i];
    for (std::size_t t = 0; t < d.e_range.size(); ++t)
      out << i << ',' << num(d.e_range[t]) << ',' << num(d.e_velocity[t]) << ','
          << num(d.e_horizontal[t]) << ',' << num(d.e_vertical[t]) << '\n';
  }
}

void write_detections_csv(const std::string& path, std::span<const DropResult> drops) {
  auto out = open_out(path);
  out << "drop,n,nu,range_m,vel_mps,az_deg,el_deg,x,y,z,power_db\n";
  for (std::size_t i = 0; i < drops.size(); ++i) {
    for (const auto& det : drops[i].detections)
      out << i << ',' << det.bin << ',' << det.nu << ',' << num(det.range_m) << ','
          << num(det.radial_velocity_mps) << ',' << num(det.az_deg) << ','
          << num(det.el_deg) << ',' << num(det.position.x) << ',' << num(det.position.y)
          << ',' << num(det.position.z) << ',' << num(lin2db(det.peak_power)) << '\n';
  }
}

void write_roc_csv(const std::string& path, std::span<const double> gammas_db,
                   std::span<const AggregateMetrics> rows) {
  if (gammas_db.size() != rows.size())
    throw std::invalid_argument("roc: gamma/metrics size mismatch");
  auto out = open_out(path);
  out << "gamma_db,pd,pfa,ptp,f1\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& m = rows[i];
    out << num(gammas_db[i]) << ',' << num(m.pd) << ','
        << (m.pfa ? num(*m.pfa) : "") << ',' << (m.ptp ? num(*m.ptp) : "") << ','
        << num(m.f1) << '\n';
  }
}

void write_sweep_csv(const std::string& path, std::span<const SweepRow> rows) {
  auto out = open_out(path);
  out << "value,pd,pfa,ptp,f1,vel_p50_mps,vel_p90_mps\n";
  for (const auto& r : rows) {
    const auto& m = r.metrics;
    out << r.value << ',' << num(m.pd) << ',' << (m.pfa ? num(*m.pfa) : "") << ','
        << (m.ptp ? num(*m.ptp) : "") << ',' << num(m.f1) << ','
        << num(m.velocity_err.p50) << ',' << num(m.velocity_err.p90) << '\n';
  }
}

void write_manifest(const std::string& path, const ScenarioConfig& scn,
                    const std::map<std::string, double>& timings_s) {
  json j;
  j["version"] = kVersion;
  j["seed"] = scn.master_seed;
  json cfg = json::object();
  for (const auto& [k, v] : scenario_to_kv(scn)) cfg[k] = v;
  j["config"] = cfg;
  json tm = json::object();
  for (const auto& [k, v] : timings_s) tm[k] = json_num(v);
  j["timings_s"] = tm;
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

void dump_rd_raster(const std::string& stem, const RangeDopplerCube& cube) {
  {
    auto out = open_out(stem + ".f32", true);
    for (int bin = 0; bin < cube.n_bins; ++bin)
      for (int nu = 0; nu < cube.n_d; ++nu)
        write_f32_le(out, float(cube.power[std::size_t(bin) * cube.n_d + nu]));
  }
  json j;
  j["dtype"] = "float32_le";
  j["shape"] = {cube.n_bins, cube.n_d};
  j["axes"] = {"range_bin", "doppler_bin"};
  j["range_per_bin_m"] = cube.range_per_bin_m;
  j["velocity_per_bin_mps"] = cube.velocity_per_bin_mps;
  j["doppler_center_bin"] = cube.n_d / 2;
  j["n_rf"] = cube.n_rf;
  auto out = open_out(stem + ".json");
  out << j.dump(2) << '\n';
}

void dump_prs_grid(const std::string& stem, const PrsGrid& grid) {
  {
    auto out = open_out(stem + ".c64", true);
    for (int occ = 0; occ < grid.n_occ; ++occ)
      for (int sym = 0; sym < grid.n_sym; ++sym)
        for (int k = 0; k < grid.n_sc; ++k) {
          const cd v = grid.at(k, sym, occ);
          write_f32_le(out, float(v.real()));
          write_f32_le(out, float(v.imag()));
        }
  }
  json j;
  j["dtype"] = "complex64_le";
  j["shape"] = {grid.n_occ, grid.n_sym, grid.n_sc};
  j["axes"] = {"occasion", "symbol", "subcarrier"};
  j["comb_size"] = grid.comb_size;
  auto out = open_out(stem + ".json");
  out << j.dump(2) << '\n';
}

void dump_paths_json(const std::string& path, std::span<const PathEntry> paths) {
  json arr = json::array();
  for (const auto& p : paths) {
    arr.push_back(json{{"delay_s", json_num(p.delay_s)},
                       {"aoa_az_deg", json_num(p.aoa_az_deg)},
                       {"aoa_el_deg", json_num(p.aoa_el_deg)},
                       {"aod_az_deg", json_num(p.aod_az_deg)},
                       {"aod_el_deg", json_num(p.aod_el_deg)},
                       {"gain_re", json_num(p.gain.real())},
                       {"gain_im", json_num(p.gain.imag())},
                       {"doppler_hz", json_num(p.doppler_hz)}});
  }
  auto out = open_out(path);
  out << arr.dump(2) << '\n';
}

}  // namespace nrs
