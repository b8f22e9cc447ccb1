// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "nrsense/array.hpp"
#include "nrsense/channel.hpp"
#include "nrsense/common.hpp"
#include "nrsense/prs.hpp"

namespace nrs {

enum class Window { rectangular, hann };
Window window_from_string(const std::string& s);
std::string to_string(Window w);
std::vector<double> make_window(Window w, int n);

// Tone layout of the destaggered frequency vector for one occasion.
struct DestaggerPlan {
  std::vector<int> tone_subcarrier;  // actual subcarrier index per tone
  std::vector<int> tone_symbol;      // PRS symbol carrying each tone
  std::vector<int> tone_position;    // position in the uniform destaggered grid
  int n_positions = 0;
  double tone_spacing_hz = 0;        // effective uniform spacing (Delta f_eff)
  int n_tones() const { return int(tone_subcarrier.size()); }
};

// Throws on comb-offset collisions across symbols (e.g. L_PRS > K).
DestaggerPlan make_destagger_plan(const PrsConfig& cfg);

// Eq.-style LS estimate y s* / (sqrt(P) |s|^2); rejects inactive REs (s = 0).
std::vector<cd> ls_estimate(std::span<const cd> y, cd s, double p_tx_w);
cd ls_estimate_scalar(cd y, cd s, double p_tx_w);

// Destaggered per-chain channel estimates over one CPI.
struct ChannelEstimateGrid {
  int n_rf = 0, n_occ = 0;
  DestaggerPlan plan;
  std::vector<cd> est;  // [chain][occ][tone]

  std::size_t idx(int chain, int occ, int tone) const {
    return (std::size_t(chain) * n_occ + occ) * plan.n_tones() + tone;
  }
  static ChannelEstimateGrid create(int n_rf, int n_occ, DestaggerPlan plan,
                                    std::vector<cd> est);  // rejects non-finite values
};

// raw[chain][occ][sym][k] dense over n_subcarriers (zeros on inactive REs)
ChannelEstimateGrid destagger(const PrsConfig& cfg, std::span<const cd> raw, int n_rf);

// Windowed range IFFT of one destaggered occasion vector. n_r must be a power
// of two and at least plan.n_positions.
std::vector<cd> range_profile(std::span<const cd> est_tones, const DestaggerPlan& plan,
                              int n_r, std::span<const double> window);

// Slow-time mean subtraction in place; data layout [bin][occasion].
// Subtracts the (optionally weighted) slow-time mean per range bin. Passing the
// Doppler window as weights nulls the windowed zero-Doppler bin exactly, so a
// strong mover cannot leak a ghost into the clutter notch.
void suppress_static(std::span<cd> data, int n_bins, int n_occ,
                     std::span<const double> weights = {});

// Windowed Doppler FFT of one slow-time row, fftshifted so that output index j
// corresponds to signed Doppler bin j - n_d/2.
std::vector<cd> doppler_map_row(std::span<const cd> row, int n_d,
                                std::span<const double> window);

struct RangeDopplerCube {
  int n_rf = 0, n_bins = 0, n_d = 0;
  std::vector<cd> maps;       // [chain][bin][nu]
  std::vector<double> power;  // [bin][nu], noncoherent sum over chains
  double range_per_bin_m = 0;
  double velocity_per_bin_mps = 0;

  std::size_t midx(int chain, int bin, int nu) const {
    return (std::size_t(chain) * n_bins + bin) * n_d + nu;
  }
  double range_of(int bin) const { return bin * range_per_bin_m; }
  double velocity_of(int nu) const { return (nu - n_d / 2) * velocity_per_bin_mps; }
  std::vector<cd> snapshot(int bin, int nu) const;
};

struct CfarConfig {
  int guard_range = 2, guard_doppler = 2;
  int train_range = 8, train_doppler = 4;
  double threshold_db = 20.0;
  int nms_range = 3, nms_doppler = 3;
  void validate() const;
};

struct CfarPeak {
  int bin = 0, nu = 0;
  double power = 0;
  double noise_est = 0;
};

// 2D CA-CFAR with edge-clipped training ring followed by non-maximum
// suppression (local power maxima within the NMS radius).
std::vector<CfarPeak> cfar_detect(std::span<const double> power, int n_bins, int n_d,
                                  const CfarConfig& cfg);

struct AoaConfig {
  enum class Method { fft, bartlett };
  Method method = Method::fft;
  int fft_size = 128;
  double scan_step_deg = 1.0;
  double el_min_deg = -10.0, el_max_deg = 90.0;
  Window window = Window::rectangular;
};
AoaConfig::Method aoa_method_from_string(const std::string& s);

struct AoaResult {
  double az_deg = 0, el_deg = 0;  // global frame
};

// Beamspace power spectrum |FFT2(W .* X_grid)|^2, row-major fft_size^2.
std::vector<double> beamspace_spectrum(std::span<const cd> snapshot, int rows, int cols,
                                       int fft_size, std::span<const double> row_window,
                                       std::span<const double> col_window);

// Beamspace-FFT AoA; requires half-wavelength spacing in both dimensions.
AoaResult aoa_fft(std::span<const cd> snapshot, const ArrayConfig& cfg, int fft_size,
                  Window window);

using SteeringFn = std::function<std::vector<cd>(double az_deg, double el_deg)>;

// Bartlett scan over the given grids; ties broken toward smallest |az|, |el|.
AoaResult aoa_bartlett(std::span<const cd> snapshot, const SteeringFn& steering,
                       std::span<const double> az_grid_deg,
                       std::span<const double> el_grid_deg);

// Same scan with precomputed steering vectors, table[el_index * n_az + az_index].
AoaResult aoa_bartlett_table(std::span<const cd> snapshot,
                             std::span<const std::vector<cd>> table,
                             std::span<const double> az_grid_deg,
                             std::span<const double> el_grid_deg);

struct Detection {
  double range_m = 0;
  double radial_velocity_mps = 0;
  double az_deg = 0, el_deg = 0;
  Vec3 position;
  double peak_power = 0;
  double snr_proxy_db = 0;
  int bin = 0, nu = 0;
};

// p = p_TRP + R u(az, el); returns nullopt when sector-gated (azimuth outside
// bounds or negative altitude).
std::optional<Detection> localize(double range_m, double velocity_mps, double az_deg,
                                  double el_deg, const SectorGeometry& sector);

struct RdParams {
  int n_r = 0;  // 0: next power of two >= destaggered length
  int n_d = 0;  // 0: n_cpi
  Window range_window = Window::hann;
  Window doppler_window = Window::hann;
  double max_range_m = 550.0;  // cube range crop
};

struct ProcessStats {
  double pre_suppression_power = 0;
  double post_suppression_power = 0;
};

// Full per-CPI receiver chain: observation synthesis + LS + destagger +
// range IFFT + clutter suppression + Doppler FFT + noncoherent integration.
class SensingChain {
 public:
  SensingChain(const PrsConfig& prs, const ArrayConfig& array_cfg, RxKind rx_kind,
               const RdParams& rd);

  const DestaggerPlan& plan() const { return plan_; }
  const RxArchitecture& rx() const { return rx_; }
  const std::vector<cd>& precoder() const { return precoder_; }
  int n_r() const { return n_r_; }
  int n_d() const { return n_d_; }
  double range_per_bin() const { return range_per_bin_; }
  double velocity_per_bin() const { return velocity_per_bin_; }

  RangeDopplerCube process(std::span<const PathEntry> paths, const PrsGrid& grid,
                           const NoiseModel& noise, std::mt19937_64& rng,
                           ProcessStats* stats = nullptr) const;

  std::vector<Detection> detect(const RangeDopplerCube& cube, const CfarConfig& cfar,
                                const AoaConfig& aoa, const SectorGeometry& sector,
                                int* gated_count = nullptr) const;

 private:
  PrsConfig prs_;
  ArrayConfig array_;
  RxArchitecture rx_;
  std::vector<cd> precoder_;
  DestaggerPlan plan_;
  RdParams rd_;
  int n_r_ = 0, n_d_ = 0, n_keep_ = 0;
  double range_per_bin_ = 0, velocity_per_bin_ = 0;
  std::vector<double> w_range_, w_doppler_;
};

}  // namespace nrs
