// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <random>
#include <span>
#include <vector>

#include "nrsense/array.hpp"
#include "nrsense/common.hpp"
#include "nrsense/prs.hpp"

namespace nrs {

// Sector / deployment geometry for one TRP site.
struct SectorGeometry {
  Vec3 trp_position{0, 0, 25.0};
  double yaw_deg = 30.0;        // sector boresight azimuth
  double halfwidth_deg = 60.0;  // sector azimuth half-width
  double radius_m = 500.0;      // horizontal coverage radius
  double alt_min_m = 25.0, alt_max_m = 300.0;
  double speed_min_kmh = 0.0, speed_max_kmh = 180.0;
  double min_dist_m = 10.0;  // BS-target and target-target 3D minimum
  int max_rejection_rounds = 10000;

  bool azimuth_in_sector(double az_deg) const {
    return std::abs(wrap_deg(az_deg - yaw_deg)) <= halfwidth_deg;
  }
};

struct TargetState {
  Vec3 position;  // m
  Vec3 velocity;  // m/s, horizontal
  double rcs_mean_dbsm = -12.81;  // sigma_M
  double rcs_angular = 1.0;       // sigma_D (linear)
  double rcs_sigma_db = 3.74;     // std of 10log10(sigma_S)
};

// One propagation path after TRP->SP->TRP coupling (or one background cluster).
struct PathEntry {
  double delay_s = 0;
  double aoa_az_deg = 0, aoa_el_deg = 0;
  double aod_az_deg = 0, aod_el_deg = 0;
  cd gain{0, 0};        // complex amplitude at t = 0, field units
  double doppler_hz = 0;
};

struct TargetPaths {
  int target_index = -1;
  std::vector<PathEntry> paths;  // paths[0] is the direct single-bounce path
};

using PathSet = std::vector<TargetPaths>;

struct ScatterParams {
  int n_scatter = 4;
  double delay_spread_s = 100e-9;
  double angle_spread_deg = 5.0;       // Laplacian scale around the direct angles
  double power_mean_db = -22.0;        // log-normal mean relative to the direct ray
  double power_std_db = 4.0;
  double drop_threshold_db = 40.0;     // relative to the strongest coupled path
};

enum class PathlossLaw { free_space, uma_nlos };

struct BackgroundParams {
  int n_rp = 3;
  double dist_min_m = 20.0, dist_max_m = 100.0;
  double height_min_m = 0.0, height_max_m = 10.0;
  int n_clusters = 10;
  double delay_spread_s = 200e-9;
  double angle_spread_deg = 30.0;
  double shadow_std_db = 6.0;
  PathlossLaw pathloss = PathlossLaw::uma_nlos;
};

struct RpRealization {
  Vec3 position;
  double pathloss_db = 0, shadow_db = 0;
  std::vector<PathEntry> clusters;  // gains already scaled by 10^(-(PL+SF)/20)
};

struct BackgroundRealization {
  std::vector<RpRealization> rps;
  std::vector<PathEntry> all_paths() const;
};

struct NoiseModel {
  double noise_psd_dbm_hz = -174.0;
  double noise_figure_db = 5.0;
  double si_power_dbm = kNegInfDb;  // residual SI per RE; -inf disables
  bool thermal_enabled = true;

  // per-active-RE thermal noise variance (one subcarrier of bandwidth scs)
  double noise_variance_w(double scs_hz) const {
    if (!thermal_enabled) return 0.0;
    return dbm2watt(noise_psd_dbm_hz + noise_figure_db) * scs_hz;
  }
  double si_variance_w() const { return dbm2watt(si_power_dbm); }
};

// one-way path loss in dB at carrier fc
double pathloss_db(PathlossLaw law, double dist_m, double carrier_hz);

std::vector<TargetState> draw_targets(const SectorGeometry& geo, int n_targets,
                                      std::mt19937_64& rng);

// sigma_RCS = sigma_M * sigma_D * sigma_S, one draw per target per drop
double draw_rcs(const TargetState& t, std::mt19937_64& rng);

TargetPaths target_paths(const TargetState& t, int target_index, const SectorGeometry& geo,
                         double rcs_m2, const ScatterParams& sp, double wavelength_m,
                         std::mt19937_64& rng);

BackgroundRealization background_channel(const SectorGeometry& geo,
                                         const BackgroundParams& bp, double carrier_hz,
                                         std::mt19937_64& rng);

// radial velocity toward the TRP (positive = approaching)
double radial_velocity(const TargetState& t, const Vec3& trp);

struct ChannelRealization {
  PathSet targets;
  BackgroundRealization background;
  std::vector<PathEntry> flatten() const;
};

// Full N x N frequency response at one RE: sum over paths of
// gain * exp(j 2 pi f_D t) * exp(-j 2 pi f_k tau) * a_rx a_tx^H. Row-major N x N.
std::vector<cd> cfr_at(std::span<const PathEntry> paths, const ArrayConfig& cfg,
                       double baseband_freq_hz, double time_s);

// Factorized renderer for the effective per-chain channel
// g[i](tone, occasion) = w_i^H H f on the destaggered PRS tones.
class EffectiveChannelRenderer {
 public:
  // tone_subcarrier[t] / tone_symbol[t]: subcarrier index and PRS symbol of
  // destaggered tone t within each occasion.
  EffectiveChannelRenderer(std::span<const PathEntry> paths, const ArrayConfig& array_cfg,
                           const RxArchitecture& rx, std::span<const cd> precoder,
                           const PrsConfig& prs, std::span<const int> tone_subcarrier,
                           std::span<const int> tone_symbol);

  int n_tones() const { return n_tones_; }
  int n_occasions() const { return n_occ_; }

  // occasion-major: out[m * n_tones + t] = g_i at tone t, occasion m
  void render_chain(int chain, std::span<cd> out) const;

 private:
  int n_tones_ = 0, n_occ_ = 0, n_sym_ = 0, n_paths_ = 0, n_rf_ = 0;
  std::vector<cd> b_;        // [path][chain]  W^H a_rx
  std::vector<cd> txgain_;   // [path]         gain * (a_tx^H f)
  std::vector<cd> freq_;     // [path][tone]   exp(-j 2 pi f_k tau)
  std::vector<cd> dopp_;     // [path][occ*n_sym + sym] exp(j 2 pi f_D t)
  std::vector<int> tone_sym_;
};

// Adds circular complex Gaussian thermal noise and residual SI per entry.
void apply_noise_and_si(std::span<cd> samples, const NoiseModel& noise, double scs_hz,
                        std::mt19937_64& rng);

}  // namespace nrs
