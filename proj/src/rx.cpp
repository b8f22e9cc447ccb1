// SPDX-License-Identifier: Apache-2.0
#include "nrsense/rx.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "nrsense/fft.hpp"

namespace nrs {

Window window_from_string(const std::string& s) {
  if (s == "rect" || s == "rectangular") return Window::rectangular;
  if (s == "hann") return Window::hann;
  throw std::invalid_argument("unknown window '" + s + "'");
}

std::string to_string(Window w) {
  return w == Window::hann ? "hann" : "rect";
}

std::vector<double> make_window(Window w, int n) {
  std::vector<double> out(std::size_t(n), 1.0);
  if (w == Window::hann && n > 1)
    for (int i = 0; i < n; ++i)
      out[i] = 0.5 * (1.0 - std::cos(2.0 * kPi * i / (n - 1)));
  return out;
}

DestaggerPlan make_destagger_plan(const PrsConfig& cfg) {
  cfg.validate();
  DestaggerPlan plan;
  std::map<int, int> seen;  // subcarrier -> symbol
  for (int l = 0; l < cfg.n_prs_symbols; ++l) {
    const int off = cfg.comb_offset(l);
    for (int k = off; k < cfg.n_subcarriers; k += cfg.comb_size) {
      auto [it, inserted] = seen.emplace(k, l);
      if (!inserted)
        throw std::invalid_argument(
            "destagger: comb-offset collision between symbols " +
            std::to_string(it->second) + " and " + std::to_string(l));
    }
  }
  for (const auto& [k, l] : seen) {
    plan.tone_subcarrier.push_back(k);
    plan.tone_symbol.push_back(l);
  }
  // uniform compaction when the tone set is an arithmetic progression
  const int n = plan.n_tones();
  int stride = n > 1 ? plan.tone_subcarrier[1] - plan.tone_subcarrier[0] : 1;
  bool uniform = true;
  for (int t = 1; t < n; ++t)
    if (plan.tone_subcarrier[t] - plan.tone_subcarrier[t - 1] != stride) {
      uniform = false;
      break;
    }
  const int k0 = plan.tone_subcarrier.empty() ? 0 : plan.tone_subcarrier[0];
  if (uniform && stride >= 1) {
    plan.tone_spacing_hz = stride * cfg.scs_hz;
    for (int t = 0; t < n; ++t)
      plan.tone_position.push_back((plan.tone_subcarrier[t] - k0) / stride);
  } else {
    plan.tone_spacing_hz = cfg.scs_hz;
    for (int t = 0; t < n; ++t) plan.tone_position.push_back(plan.tone_subcarrier[t] - k0);
  }
  plan.n_positions = plan.tone_position.empty() ? 0 : plan.tone_position.back() + 1;
  return plan;
}

cd ls_estimate_scalar(cd y, cd s, double p_tx_w) {
  const double s2 = std::norm(s);
  if (s2 <= 0) throw std::invalid_argument("ls_estimate: inactive RE (s = 0)");
  return y * std::conj(s) / (std::sqrt(p_tx_w) * s2);
}

std::vector<cd> ls_estimate(std::span<const cd> y, cd s, double p_tx_w) {
  const double s2 = std::norm(s);
  if (s2 <= 0) throw std::invalid_argument("ls_estimate: inactive RE (s = 0)");
  const cd scale = std::conj(s) / (std::sqrt(p_tx_w) * s2);
  std::vector<cd> g(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) g[i] = y[i] * scale;
  return g;
}

ChannelEstimateGrid ChannelEstimateGrid::create(int n_rf, int n_occ, DestaggerPlan plan,
                                                std::vector<cd> est) {
  if (est.size() != std::size_t(n_rf) * n_occ * plan.n_tones())
    throw std::invalid_argument("ChannelEstimateGrid: size mismatch");
  for (const cd& v : est)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw std::invalid_argument("ChannelEstimateGrid: non-finite estimate");
  ChannelEstimateGrid g;
  g.n_rf = n_rf;
  g.n_occ = n_occ;
  g.plan = std::move(plan);
  g.est = std::move(est);
  return g;
}

ChannelEstimateGrid destagger(const PrsConfig& cfg, std::span<const cd> raw, int n_rf) {
  auto plan = make_destagger_plan(cfg);
  const int n_occ = cfg.n_cpi, n_sym = cfg.n_prs_symbols, n_sc = cfg.n_subcarriers;
  if (raw.size() != std::size_t(n_rf) * n_occ * n_sym * n_sc)
    throw std::invalid_argument("destagger: raw grid size mismatch");
  std::vector<cd> est(std::size_t(n_rf) * n_occ * plan.n_tones());
  for (int i = 0; i < n_rf; ++i)
    for (int m = 0; m < n_occ; ++m)
      for (int t = 0; t < plan.n_tones(); ++t) {
        const int k = plan.tone_subcarrier[t];
        const int l = plan.tone_symbol[t];
        est[(std::size_t(i) * n_occ + m) * plan.n_tones() + t] =
            raw[((std::size_t(i) * n_occ + m) * n_sym + l) * n_sc + k];
      }
  return ChannelEstimateGrid::create(n_rf, n_occ, std::move(plan), std::move(est));
}

namespace {

void range_profile_into(std::span<const cd> est_tones, const DestaggerPlan& plan,
                        const Fft& fft, std::span<const double> window,
                        std::span<cd> buf) {
  std::fill(buf.begin(), buf.end(), cd{0, 0});
  for (int t = 0; t < plan.n_tones(); ++t)
    buf[plan.tone_position[t]] = window[t] * est_tones[t];
  fft.inverse(buf.data());
  const double scale = 1.0 / std::sqrt(double(fft.size()));
  for (auto& v : buf) v *= scale;
}

void doppler_row_into(std::span<const cd> row, const Fft& fft,
                      std::span<const double> window, std::span<cd> buf,
                      std::span<cd> out) {
  const int n_d = int(fft.size());
  std::fill(buf.begin(), buf.end(), cd{0, 0});
  for (std::size_t m = 0; m < row.size(); ++m) buf[m] = window[m] * row[m];
  fft.forward(buf.data());
  const double scale = 1.0 / std::sqrt(double(n_d));
  for (int j = 0; j < n_d; ++j) out[j] = scale * buf[(j + n_d / 2) % n_d];
}

}  // namespace

std::vector<cd> range_profile(std::span<const cd> est_tones, const DestaggerPlan& plan,
                              int n_r, std::span<const double> window) {
  if (n_r < plan.n_positions)
    throw std::invalid_argument("range_profile: n_r smaller than destaggered length");
  Fft fft{std::size_t(n_r)};
  auto out = std::vector<cd>(std::size_t(n_r));
  range_profile_into(est_tones, plan, fft, window, out);
  return out;
}

void suppress_static(std::span<cd> data, int n_bins, int n_occ,
                     std::span<const double> weights) {
  if (n_occ < 2) throw std::invalid_argument("suppress_static: need at least 2 occasions");
  if (!weights.empty() && weights.size() != std::size_t(n_occ))
    throw std::invalid_argument("suppress_static: weight length mismatch");
  double wsum = double(n_occ);
  if (!weights.empty()) {
    wsum = 0;
    for (double w : weights) wsum += w;
    if (wsum <= 0) throw std::invalid_argument("suppress_static: degenerate weights");
  }
  for (int b = 0; b < n_bins; ++b) {
    cd* row = &data[std::size_t(b) * n_occ];
    cd mean{0, 0};
    for (int m = 0; m < n_occ; ++m) mean += (weights.empty() ? 1.0 : weights[m]) * row[m];
    mean /= wsum;
    for (int m = 0; m < n_occ; ++m) row[m] -= mean;
  }
}

std::vector<cd> doppler_map_row(std::span<const cd> row, int n_d,
                                std::span<const double> window) {
  if (n_d < int(row.size()))
    throw std::invalid_argument("doppler_map_row: n_d smaller than slow-time length");
  Fft fft{std::size_t(n_d)};
  auto buf = std::vector<cd>(std::size_t(n_d));
  auto out = std::vector<cd>(std::size_t(n_d));
  doppler_row_into(row, fft, window, buf, out);
  return out;
}

std::vector<cd> RangeDopplerCube::snapshot(int bin, int nu) const {
  auto out = std::vector<cd>(std::size_t(n_rf));
  for (int i = 0; i < n_rf; ++i) out[i] = maps[midx(i, bin, nu)];
  return out;
}

void CfarConfig::validate() const {
  if (guard_range < 0 || guard_doppler < 0 || train_range < 0 || train_doppler < 0)
    throw std::invalid_argument("cfar: window sizes must be >= 0");
  if (train_range == 0 && train_doppler == 0)
    throw std::invalid_argument("cfar: training window is empty");
  if (threshold_db <= 0) throw std::invalid_argument("cfar: threshold_db must be > 0");
  if (nms_range < 0 || nms_doppler < 0)
    throw std::invalid_argument("cfar: nms radius must be >= 0");
}

std::vector<CfarPeak> cfar_detect(std::span<const double> power, int n_bins, int n_d,
                                  const CfarConfig& cfg) {
  cfg.validate();
  if (power.size() != std::size_t(n_bins) * n_d)
    throw std::invalid_argument("cfar_detect: power map size mismatch");
  const double gamma = db2lin(cfg.threshold_db);

  // summed-area table for O(1) clipped ring sums
  std::vector<double> sat(std::size_t(n_bins + 1) * (n_d + 1), 0.0);
  for (int b = 0; b < n_bins; ++b)
    for (int d = 0; d < n_d; ++d)
      sat[std::size_t(b + 1) * (n_d + 1) + d + 1] =
          power[std::size_t(b) * n_d + d] + sat[std::size_t(b) * (n_d + 1) + d + 1] +
          sat[std::size_t(b + 1) * (n_d + 1) + d] - sat[std::size_t(b) * (n_d + 1) + d];

  auto box = [&](int b0, int b1, int d0, int d1, int& count) -> double {
    b0 = std::max(b0, 0);
    d0 = std::max(d0, 0);
    b1 = std::min(b1, n_bins - 1);
    d1 = std::min(d1, n_d - 1);
    if (b0 > b1 || d0 > d1) {
      count = 0;
      return 0.0;
    }
    count = (b1 - b0 + 1) * (d1 - d0 + 1);
    return sat[std::size_t(b1 + 1) * (n_d + 1) + d1 + 1] -
           sat[std::size_t(b0) * (n_d + 1) + d1 + 1] -
           sat[std::size_t(b1 + 1) * (n_d + 1) + d0] +
           sat[std::size_t(b0) * (n_d + 1) + d0];
  };

  const int gr = cfg.guard_range, gd = cfg.guard_doppler;
  const int tr = gr + cfg.train_range, td = gd + cfg.train_doppler;

  std::vector<CfarPeak> peaks;
  for (int b = 0; b < n_bins; ++b) {
    for (int d = 0; d < n_d; ++d) {
      const double p = power[std::size_t(b) * n_d + d];
      int n_outer = 0, n_inner = 0;
      const double outer = box(b - tr, b + tr, d - td, d + td, n_outer);
      const double inner = box(b - gr, b + gr, d - gd, d + gd, n_inner);
      const int n_train = n_outer - n_inner;
      if (n_train <= 0) continue;
      const double sigma2 = (outer - inner) / n_train;
      if (!(p > gamma * sigma2)) continue;

      // NMS: keep only local power maxima within the radius
      bool is_max = true;
      for (int db = -cfg.nms_range; db <= cfg.nms_range && is_max; ++db) {
        const int nb = b + db;
        if (nb < 0 || nb >= n_bins) continue;
        for (int dd = -cfg.nms_doppler; dd <= cfg.nms_doppler; ++dd) {
          const int nd = d + dd;
          if (nd < 0 || nd >= n_d || (db == 0 && dd == 0)) continue;
          const double q = power[std::size_t(nb) * n_d + nd];
          if (q > p || (q == p && (nb < b || (nb == b && nd < d)))) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max) peaks.push_back({b, d, p, sigma2});
    }
  }
  return peaks;
}

AoaConfig::Method aoa_method_from_string(const std::string& s) {
  if (s == "fft") return AoaConfig::Method::fft;
  if (s == "bartlett") return AoaConfig::Method::bartlett;
  throw std::invalid_argument("aoa.method: unknown method '" + s + "'");
}

std::vector<double> beamspace_spectrum(std::span<const cd> snapshot, int rows, int cols,
                                       int fft_size, std::span<const double> row_window,
                                       std::span<const double> col_window) {
  if (int(snapshot.size()) != rows * cols)
    throw std::invalid_argument("beamspace_spectrum: snapshot size mismatch");
  const int p = fft_size;
  Fft fft{std::size_t(p)};
  std::vector<cd> grid(std::size_t(p) * p, cd{0, 0});
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      grid[std::size_t(r) * p + c] =
          row_window[r] * col_window[c] * snapshot[std::size_t(r) * cols + c];
  for (int r = 0; r < rows; ++r) fft.forward(&grid[std::size_t(r) * p]);
  auto colbuf = std::vector<cd>(std::size_t(p));
  for (int q = 0; q < p; ++q) {
    for (int r = 0; r < p; ++r) colbuf[r] = grid[std::size_t(r) * p + q];
    fft.forward(colbuf.data());
    for (int r = 0; r < p; ++r) grid[std::size_t(r) * p + q] = colbuf[r];
  }
  std::vector<double> out(std::size_t(p) * p);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::norm(grid[i]);
  return out;
}

AoaResult aoa_fft(std::span<const cd> snapshot, const ArrayConfig& cfg, int fft_size,
                  Window window) {
  if (std::abs(cfg.dh - 0.5) > 1e-9 || std::abs(cfg.dv - 0.5) > 1e-9)
    throw std::invalid_argument("aoa_fft: requires half-wavelength spacing (use Bartlett)");
  if (int(snapshot.size()) != cfg.n())
    throw std::invalid_argument("aoa_fft: snapshot size mismatch");
  const auto wr = make_window(window, cfg.n_rows);
  const auto wc = make_window(window, cfg.n_cols);
  const auto spec = beamspace_spectrum(snapshot, cfg.n_rows, cfg.n_cols, fft_size, wr, wc);

  const int p = fft_size;
  double best = -1.0;
  int bp = 0, bq = 0;
  for (int pr = 0; pr < p; ++pr) {
    const int sp = pr >= p / 2 ? pr - p : pr;
    const double uz = 2.0 * sp / p;
    for (int q = 0; q < p; ++q) {
      const int sq = q >= p / 2 ? q - p : q;
      const double uy = 2.0 * sq / p;
      if (uy * uy + uz * uz > 1.0) continue;  // non-physical bin
      const double v = spec[std::size_t(pr) * p + q];
      if (v > best) {
        best = v;
        bp = sp;
        bq = sq;
      }
    }
  }
  const double uz = 2.0 * bp / p, uy = 2.0 * bq / p;
  const double ux = std::sqrt(std::max(0.0, 1.0 - uy * uy - uz * uz));
  const double laz = rad2deg(std::atan2(uy, ux));
  const double lel = rad2deg(std::asin(std::clamp(uz, -1.0, 1.0)));
  AoaResult res;
  local_to_global(cfg, laz, lel, res.az_deg, res.el_deg);
  return res;
}

AoaResult aoa_bartlett(std::span<const cd> snapshot, const SteeringFn& steering,
                       std::span<const double> az_grid_deg,
                       std::span<const double> el_grid_deg) {
  if (az_grid_deg.empty() || el_grid_deg.empty())
    throw std::invalid_argument("aoa_bartlett: empty scan grid");
  double best = -1.0;
  AoaResult res;
  for (double el : el_grid_deg) {
    for (double az : az_grid_deg) {
      const auto a = steering(az, el);
      cd acc{0, 0};
      double an2 = 0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        acc += std::conj(a[i]) * snapshot[i];
        an2 += std::norm(a[i]);
      }
      const double pb = an2 > 0 ? std::norm(acc) / an2 : 0.0;
      const bool better =
          pb > best ||
          (pb == best && (std::abs(az) < std::abs(res.az_deg) ||
                          (std::abs(az) == std::abs(res.az_deg) &&
                           std::abs(el) < std::abs(res.el_deg))));
      if (better) {
        best = pb;
        res.az_deg = az;
        res.el_deg = el;
      }
    }
  }
  return res;
}

AoaResult aoa_bartlett_table(std::span<const cd> snapshot,
                             std::span<const std::vector<cd>> table,
                             std::span<const double> az_grid_deg,
                             std::span<const double> el_grid_deg) {
  if (az_grid_deg.empty() || el_grid_deg.empty())
    throw std::invalid_argument("aoa_bartlett: empty scan grid");
  double best = -1.0;
  AoaResult res;
  for (std::size_t ei = 0; ei < el_grid_deg.size(); ++ei) {
    for (std::size_t ai = 0; ai < az_grid_deg.size(); ++ai) {
      const auto& a = table[ei * az_grid_deg.size() + ai];
      cd acc{0, 0};
      double an2 = 0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        acc += std::conj(a[i]) * snapshot[i];
        an2 += std::norm(a[i]);
      }
      const double pb = an2 > 0 ? std::norm(acc) / an2 : 0.0;
      const double az = az_grid_deg[ai], el = el_grid_deg[ei];
      const bool better =
          pb > best ||
          (pb == best && (std::abs(az) < std::abs(res.az_deg) ||
                          (std::abs(az) == std::abs(res.az_deg) &&
                           std::abs(el) < std::abs(res.el_deg))));
      if (better) {
        best = pb;
        res.az_deg = az;
        res.el_deg = el;
      }
    }
  }
  return res;
}

std::optional<Detection> localize(double range_m, double velocity_mps, double az_deg,
                                  double el_deg, const SectorGeometry& sector) {
  if (!sector.azimuth_in_sector(az_deg)) return std::nullopt;
  Detection d;
  d.range_m = range_m;
  d.radial_velocity_mps = velocity_mps;
  d.az_deg = az_deg;
  d.el_deg = el_deg;
  d.position = sector.trp_position + unit_dir(az_deg, el_deg) * range_m;
  if (d.position.z < 0) return std::nullopt;
  return d;
}

SensingChain::SensingChain(const PrsConfig& prs, const ArrayConfig& array_cfg,
                           RxKind rx_kind, const RdParams& rd)
    : prs_(prs), array_(array_cfg), rd_(rd) {
  prs_.validate();
  array_.validate();
  rx_ = make_rx_architecture(rx_kind, array_);
  precoder_ = quasi_omni_precoder(array_);
  plan_ = make_destagger_plan(prs_);

  n_r_ = rd.n_r > 0 ? rd.n_r : int(next_pow2(std::size_t(plan_.n_positions)));
  if (n_r_ < plan_.n_positions)
    throw std::invalid_argument("rd.n_r smaller than destaggered length");
  n_d_ = rd.n_d > 0 ? rd.n_d : prs_.n_cpi;
  if (n_d_ < prs_.n_cpi) throw std::invalid_argument("rd.n_d smaller than n_cpi");
  if ((n_d_ & (n_d_ - 1)) != 0 || (n_r_ & (n_r_ - 1)) != 0)
    throw std::invalid_argument("rd: FFT sizes must be powers of two");

  range_per_bin_ = kSpeedOfLight / (2.0 * n_r_ * plan_.tone_spacing_hz);
  velocity_per_bin_ = prs_.wavelength() / (2.0 * n_d_ * prs_.prs_period_s);
  n_keep_ = std::min(n_r_, int(std::ceil(rd.max_range_m / range_per_bin_)) + 1);
  w_range_ = make_window(rd.range_window, plan_.n_tones());
  w_doppler_ = make_window(rd.doppler_window, prs_.n_cpi);
}

RangeDopplerCube SensingChain::process(std::span<const PathEntry> paths,
                                       const PrsGrid& grid, const NoiseModel& noise,
                                       std::mt19937_64& rng, ProcessStats* stats) const {
  const int n_rf = rx_.n_rf;
  const int n_occ = prs_.n_cpi;
  const int n_tones = plan_.n_tones();
  const double sqrt_p = std::sqrt(prs_.tx_power_w());

  EffectiveChannelRenderer renderer(paths, array_, rx_, precoder_, prs_,
                                    plan_.tone_subcarrier, plan_.tone_symbol);

  RangeDopplerCube cube;
  cube.n_rf = n_rf;
  cube.n_bins = n_keep_;
  cube.n_d = n_d_;
  cube.range_per_bin_m = range_per_bin_;
  cube.velocity_per_bin_mps = velocity_per_bin_;
  cube.maps.assign(std::size_t(n_rf) * n_keep_ * n_d_, cd{0, 0});
  cube.power.assign(std::size_t(n_keep_) * n_d_, 0.0);

  Fft fft_r{std::size_t(n_r_)}, fft_d{std::size_t(n_d_)};
  std::vector<cd> g(std::size_t(n_occ) * n_tones);
  auto rprof = std::vector<cd>(std::size_t(n_r_));
  std::vector<cd> slow(std::size_t(n_keep_) * n_occ);
  auto dbuf = std::vector<cd>(std::size_t(n_d_));
  auto drow = std::vector<cd>(std::size_t(n_d_));
  if (stats) *stats = {};

  for (int i = 0; i < n_rf; ++i) {
    renderer.render_chain(i, g);

    // observation synthesis + LS estimate, occasion by occasion
    for (int m = 0; m < n_occ; ++m) {
      cd* row = &g[std::size_t(m) * n_tones];
      for (int t = 0; t < n_tones; ++t) {
        const cd s = grid.at(plan_.tone_subcarrier[t], plan_.tone_symbol[t], m);
        row[t] *= sqrt_p * s;
      }
      apply_noise_and_si({row, std::size_t(n_tones)}, noise, prs_.scs_hz, rng);
      for (int t = 0; t < n_tones; ++t) {
        const cd s = grid.at(plan_.tone_subcarrier[t], plan_.tone_symbol[t], m);
        row[t] = ls_estimate_scalar(row[t], s, prs_.tx_power_w());
      }
    }

    for (int m = 0; m < n_occ; ++m) {
      range_profile_into({&g[std::size_t(m) * n_tones], std::size_t(n_tones)}, plan_,
                         fft_r, w_range_, rprof);
      for (int b = 0; b < n_keep_; ++b) slow[std::size_t(b) * n_occ + m] = rprof[b];
    }

    if (stats)
      for (const cd& v : slow) stats->pre_suppression_power += std::norm(v);
    suppress_static(slow, n_keep_, n_occ, w_doppler_);
    if (stats)
      for (const cd& v : slow) stats->post_suppression_power += std::norm(v);

    for (int b = 0; b < n_keep_; ++b) {
      doppler_row_into({&slow[std::size_t(b) * n_occ], std::size_t(n_occ)}, fft_d,
                       w_doppler_, dbuf, drow);
      cd* dst = &cube.maps[cube.midx(i, b, 0)];
      double* pw = &cube.power[std::size_t(b) * n_d_];
      for (int j = 0; j < n_d_; ++j) {
        dst[j] = drow[j];
        pw[j] += std::norm(drow[j]);
      }
    }
  }
  return cube;
}

std::vector<Detection> SensingChain::detect(const RangeDopplerCube& cube,
                                            const CfarConfig& cfar, const AoaConfig& aoa,
                                            const SectorGeometry& sector,
                                            int* gated_count) const {
  const auto peaks = cfar_detect(cube.power, cube.n_bins, cube.n_d, cfar);

  std::vector<double> az_grid, el_grid;
  std::vector<std::vector<cd>> steer_table;
  if (aoa.method == AoaConfig::Method::bartlett) {
    for (double a = sector.yaw_deg - sector.halfwidth_deg;
         a <= sector.yaw_deg + sector.halfwidth_deg + 1e-9; a += aoa.scan_step_deg)
      az_grid.push_back(a);
    for (double e = aoa.el_min_deg; e <= aoa.el_max_deg + 1e-9; e += aoa.scan_step_deg)
      el_grid.push_back(e);
    if (!peaks.empty()) {
      steer_table.reserve(az_grid.size() * el_grid.size());
      for (double e : el_grid)
        for (double a : az_grid)
          steer_table.push_back(rx_.effective_steering(a, e, array_));
    }
  } else if (rx_.kind != RxKind::full_digital) {
    throw std::invalid_argument("aoa.method=fft requires the full-digital architecture");
  }

  int gated = 0;
  std::vector<Detection> dets;
  for (const auto& pk : peaks) {
    const auto snap = cube.snapshot(pk.bin, pk.nu);
    AoaResult ang;
    if (aoa.method == AoaConfig::Method::fft)
      ang = aoa_fft(snap, array_, aoa.fft_size, aoa.window);
    else
      ang = aoa_bartlett_table(snap, steer_table, az_grid, el_grid);

    auto det = localize(cube.range_of(pk.bin), cube.velocity_of(pk.nu), ang.az_deg,
                        ang.el_deg, sector);
    if (!det) {
      ++gated;
      continue;
    }
    det->peak_power = pk.power;
    det->snr_proxy_db = pk.noise_est > 0 ? lin2db(pk.power / pk.noise_est)
                                         : std::numeric_limits<double>::infinity();
    det->bin = pk.bin;
    det->nu = pk.nu;
    dets.push_back(*det);
  }
  if (gated_count) *gated_count = gated;
  return dets;
}

}  // namespace nrs
