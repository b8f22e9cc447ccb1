// SPDX-License-Identifier: Apache-2.0
#include "nrsense/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nrs {

double pathloss_db(PathlossLaw law, double dist_m, double carrier_hz) {
  const double d = std::max(dist_m, 1.0);
  const double fc_ghz = carrier_hz / 1e9;
  switch (law) {
    case PathlossLaw::free_space:
      return 20.0 * std::log10(4.0 * kPi * d * carrier_hz / kSpeedOfLight);
    case PathlossLaw::uma_nlos:
      // TR 38.901 UMa NLoS trend term
      return 13.54 + 39.08 * std::log10(d) + 20.0 * std::log10(fc_ghz);
  }
  return 0.0;
}

std::vector<TargetState> draw_targets(const SectorGeometry& geo, int n_targets,
                                      std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uaz(geo.yaw_deg - geo.halfwidth_deg,
                                             geo.yaw_deg + geo.halfwidth_deg);
  std::uniform_real_distribution<double> ur2(0.0, geo.radius_m * geo.radius_m);
  std::uniform_real_distribution<double> ualt(geo.alt_min_m, geo.alt_max_m);
  std::uniform_real_distribution<double> uspeed(geo.speed_min_kmh / 3.6,
                                                geo.speed_max_kmh / 3.6);
  std::uniform_real_distribution<double> uhead(0.0, 360.0);

  std::vector<TargetState> out;
  int rounds = 0;
  while (int(out.size()) < n_targets) {
    if (++rounds > geo.max_rejection_rounds)
      throw std::runtime_error("draw_targets: placement rejection limit exceeded");
    TargetState t;
    const double r = std::sqrt(ur2(rng));
    const double az = deg2rad(uaz(rng));
    t.position = {geo.trp_position.x + r * std::cos(az),
                  geo.trp_position.y + r * std::sin(az), ualt(rng)};
    const double speed = uspeed(rng);
    const double head = deg2rad(uhead(rng));
    t.velocity = {speed * std::cos(head), speed * std::sin(head), 0.0};

    if ((t.position - geo.trp_position).norm() < geo.min_dist_m) continue;
    bool ok = true;
    for (const auto& o : out)
      if ((t.position - o.position).norm() < geo.min_dist_m) { ok = false; break; }
    if (ok) out.push_back(t);
  }
  return out;
}

double draw_rcs(const TargetState& t, std::mt19937_64& rng) {
  double fluct_db = 0.0;
  if (t.rcs_sigma_db > 0) {
    std::normal_distribution<double> n(0.0, t.rcs_sigma_db);
    fluct_db = n(rng);
  }
  return db2lin(t.rcs_mean_dbsm + fluct_db) * t.rcs_angular;
}

double radial_velocity(const TargetState& t, const Vec3& trp) {
  const Vec3 d = t.position - trp;
  const double dist = d.norm();
  if (dist == 0) return 0.0;
  return -(d.dot(t.velocity)) / dist;  // positive when approaching
}

namespace {

double laplace(double scale, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  const double v = u(rng);
  return -scale * std::copysign(std::log(1.0 - 2.0 * std::abs(v)), v) / std::sqrt(2.0);
}

cd unit_phasor(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
  const double p = u(rng);
  return {std::cos(p), std::sin(p)};
}

}  // namespace

TargetPaths target_paths(const TargetState& t, int target_index, const SectorGeometry& geo,
                         double rcs_m2, const ScatterParams& sp, double wavelength_m,
                         std::mt19937_64& rng) {
  TargetPaths tp;
  tp.target_index = target_index;

  const Vec3 d = t.position - geo.trp_position;
  const double dist = d.norm();
  double az, el;
  dir_to_angles(d * (1.0 / dist), az, el);

  // direct single-bounce path: monostatic radar equation, two-way delay
  PathEntry direct;
  direct.delay_s = 2.0 * dist / kSpeedOfLight;
  direct.aoa_az_deg = direct.aod_az_deg = az;
  direct.aoa_el_deg = direct.aod_el_deg = el;
  const double p2 = wavelength_m * wavelength_m * rcs_m2 /
                    (std::pow(4.0 * kPi, 3.0) * std::pow(dist, 4.0));
  direct.gain = std::sqrt(p2) * unit_phasor(rng);
  direct.doppler_hz = 2.0 * radial_velocity(t, geo.trp_position) / wavelength_m;
  tp.paths.push_back(direct);

  std::exponential_distribution<double> edelay(1.0 / std::max(sp.delay_spread_s, 1e-12));
  std::normal_distribution<double> npow(sp.power_mean_db, sp.power_std_db);
  for (int i = 0; i < sp.n_scatter; ++i) {
    PathEntry s;
    s.delay_s = direct.delay_s + edelay(rng);
    s.aoa_az_deg = az + laplace(sp.angle_spread_deg, rng);
    s.aoa_el_deg = el + laplace(sp.angle_spread_deg, rng);
    s.aod_az_deg = az + laplace(sp.angle_spread_deg, rng);
    s.aod_el_deg = el + laplace(sp.angle_spread_deg, rng);
    const double rel_db = npow(rng);
    s.gain = std::sqrt(p2 * db2lin(rel_db)) * unit_phasor(rng);
    // Doppler from target motion projected on the ray arrival direction
    const Vec3 u = unit_dir(s.aoa_az_deg, s.aoa_el_deg);
    s.doppler_hz = -2.0 * u.dot(t.velocity) / wavelength_m;
    tp.paths.push_back(s);
  }

  // -40 dB (configurable) dropping relative to the strongest coupled path
  double max_p = 0;
  for (const auto& p : tp.paths) max_p = std::max(max_p, std::norm(p.gain));
  const double thr = max_p * db2lin(-sp.drop_threshold_db);
  std::erase_if(tp.paths, [&](const PathEntry& p) { return std::norm(p.gain) < thr; });
  return tp;
}

std::vector<PathEntry> BackgroundRealization::all_paths() const {
  std::vector<PathEntry> out;
  for (const auto& rp : rps)
    out.insert(out.end(), rp.clusters.begin(), rp.clusters.end());
  return out;
}

BackgroundRealization background_channel(const SectorGeometry& geo,
                                         const BackgroundParams& bp, double carrier_hz,
                                         std::mt19937_64& rng) {
  BackgroundRealization bg;
  std::uniform_real_distribution<double> udist(bp.dist_min_m, bp.dist_max_m);
  std::uniform_real_distribution<double> uh(bp.height_min_m, bp.height_max_m);
  std::uniform_real_distribution<double> uaz(geo.yaw_deg - geo.halfwidth_deg,
                                             geo.yaw_deg + geo.halfwidth_deg);
  std::normal_distribution<double> nsf(0.0, bp.shadow_std_db);
  std::normal_distribution<double> nang(0.0, bp.angle_spread_deg);
  std::normal_distribution<double> ng(0.0, 1.0);

  for (int r = 0; r < bp.n_rp; ++r) {
    RpRealization rp;
    const double dist = udist(rng);
    const double az = uaz(rng);
    rp.position = {geo.trp_position.x + dist * std::cos(deg2rad(az)),
                   geo.trp_position.y + dist * std::sin(deg2rad(az)), uh(rng)};
    const Vec3 d = rp.position - geo.trp_position;
    double rp_az, rp_el;
    dir_to_angles(d * (1.0 / d.norm()), rp_az, rp_el);

    rp.pathloss_db = pathloss_db(bp.pathloss, d.norm(), carrier_hz);
    rp.shadow_db = nsf(rng);
    const double scale = std::pow(10.0, -(rp.pathloss_db + rp.shadow_db) / 20.0);
    const double base_delay = d.norm() / kSpeedOfLight;

    // exponential power-delay profile, normalized to unit ensemble power
    std::vector<double> delays(bp.n_clusters);
    std::exponential_distribution<double> edelay(1.0 / std::max(bp.delay_spread_s, 1e-12));
    double wsum = 0;
    std::vector<double> w(bp.n_clusters);
    for (int c = 0; c < bp.n_clusters; ++c) {
      delays[c] = edelay(rng);
      w[c] = std::exp(-delays[c] / std::max(bp.delay_spread_s, 1e-12));
      wsum += w[c];
    }
    for (int c = 0; c < bp.n_clusters; ++c) {
      PathEntry cl;
      cl.delay_s = base_delay + delays[c];
      cl.aoa_az_deg = rp_az + nang(rng);
      cl.aoa_el_deg = rp_el + nang(rng) * 0.25;
      cl.aod_az_deg = cl.aoa_az_deg;  // monostatic static reflector
      cl.aod_el_deg = cl.aoa_el_deg;
      const double amp = std::sqrt(w[c] / wsum / 2.0);
      cl.gain = scale * cd{amp * ng(rng), amp * ng(rng)};  // Rayleigh per cluster
      cl.doppler_hz = 0.0;  // static over the CPI
      rp.clusters.push_back(cl);
    }
    bg.rps.push_back(std::move(rp));
  }
  return bg;
}

std::vector<PathEntry> ChannelRealization::flatten() const {
  std::vector<PathEntry> out;
  for (const auto& t : targets) out.insert(out.end(), t.paths.begin(), t.paths.end());
  const auto bgp = background.all_paths();
  out.insert(out.end(), bgp.begin(), bgp.end());
  return out;
}

std::vector<cd> cfr_at(std::span<const PathEntry> paths, const ArrayConfig& cfg,
                       double baseband_freq_hz, double time_s) {
  const int n = cfg.n();
  std::vector<cd> h(std::size_t(n) * n, cd{0, 0});
  for (const auto& p : paths) {
    const auto arx = steering_vector(p.aoa_az_deg, p.aoa_el_deg, cfg);
    const auto atx = steering_vector(p.aod_az_deg, p.aod_el_deg, cfg);
    const double ph = 2.0 * kPi * (p.doppler_hz * time_s - baseband_freq_hz * p.delay_s);
    const cd g = p.gain * cd{std::cos(ph), std::sin(ph)};
    for (int r = 0; r < n; ++r) {
      const cd gr = g * arx[r];
      for (int c = 0; c < n; ++c) h[std::size_t(r) * n + c] += gr * std::conj(atx[c]);
    }
  }
  return h;
}

EffectiveChannelRenderer::EffectiveChannelRenderer(
    std::span<const PathEntry> paths, const ArrayConfig& array_cfg,
    const RxArchitecture& rx, std::span<const cd> precoder, const PrsConfig& prs,
    std::span<const int> tone_subcarrier, std::span<const int> tone_symbol) {
  n_tones_ = int(tone_subcarrier.size());
  n_occ_ = prs.n_cpi;
  n_sym_ = prs.n_prs_symbols;
  n_paths_ = int(paths.size());
  n_rf_ = rx.n_rf;
  tone_sym_.assign(tone_symbol.begin(), tone_symbol.end());

  b_.resize(std::size_t(n_paths_) * n_rf_);
  txgain_.resize(n_paths_);
  freq_.resize(std::size_t(n_paths_) * n_tones_);
  dopp_.resize(std::size_t(n_paths_) * n_occ_ * n_sym_);

  for (int p = 0; p < n_paths_; ++p) {
    const auto& pe = paths[p];
    const auto brx = rx.effective_steering(pe.aoa_az_deg, pe.aoa_el_deg, array_cfg);
    std::copy(brx.begin(), brx.end(), b_.begin() + std::size_t(p) * n_rf_);

    const auto atx = steering_vector(pe.aod_az_deg, pe.aod_el_deg, array_cfg);
    cd ftx{0, 0};
    for (std::size_t e = 0; e < atx.size(); ++e) ftx += std::conj(atx[e]) * precoder[e];
    txgain_[p] = pe.gain * ftx;

    for (int t = 0; t < n_tones_; ++t) {
      const double fk = tone_subcarrier[t] * prs.scs_hz;
      const double ph = -2.0 * kPi * fk * pe.delay_s;
      freq_[std::size_t(p) * n_tones_ + t] = cd{std::cos(ph), std::sin(ph)};
    }
    for (int m = 0; m < n_occ_; ++m)
      for (int l = 0; l < n_sym_; ++l) {
        const double ph = 2.0 * kPi * pe.doppler_hz * prs.symbol_time(l, m);
        dopp_[(std::size_t(p) * n_occ_ + m) * n_sym_ + l] = cd{std::cos(ph), std::sin(ph)};
      }
  }
}

void EffectiveChannelRenderer::render_chain(int chain, std::span<cd> out) const {
  std::fill(out.begin(), out.end(), cd{0, 0});
  std::vector<cd> cs(n_sym_);
  for (int p = 0; p < n_paths_; ++p) {
    const cd coeff = txgain_[p] * b_[std::size_t(p) * n_rf_ + chain];
    if (coeff == cd{0, 0}) continue;
    const cd* fp = &freq_[std::size_t(p) * n_tones_];
    const cd* dp = &dopp_[std::size_t(p) * n_occ_ * n_sym_];
    for (int m = 0; m < n_occ_; ++m) {
      for (int l = 0; l < n_sym_; ++l) cs[l] = coeff * dp[std::size_t(m) * n_sym_ + l];
      cd* row = &out[std::size_t(m) * n_tones_];
      const int* ts = tone_sym_.data();
      for (int t = 0; t < n_tones_; ++t) row[t] += cs[ts[t]] * fp[t];
    }
  }
}

void apply_noise_and_si(std::span<cd> samples, const NoiseModel& noise, double scs_hz,
                        std::mt19937_64& rng) {
  const double var = noise.noise_variance_w(scs_hz) + noise.si_variance_w();
  if (var <= 0) return;
  const double s = std::sqrt(var / 2.0);
  std::normal_distribution<double> n(0.0, 1.0);
  for (auto& v : samples) v += cd{s * n(rng), s * n(rng)};
}

}  // namespace nrs
