// SPDX-License-Identifier: Apache-2.0
#include "nrsense/array.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nrs {

void ArrayConfig::validate() const {
  if (n_rows < 1 || n_cols < 1) throw std::invalid_argument("array: element counts must be >= 1");
  if (dh <= 0 || dv <= 0) throw std::invalid_argument("array: spacings must be > 0");
  if (beamwidth_az_deg <= 0 || beamwidth_az_deg >= 180 || beamwidth_el_deg <= 0 ||
      beamwidth_el_deg >= 180)
    throw std::invalid_argument("array: beamwidths must be in (0, 180) deg");
}

namespace {

Vec3 rot_z(const Vec3& v, double a_rad) {
  const double c = std::cos(a_rad), s = std::sin(a_rad);
  return {c * v.x - s * v.y, s * v.x + c * v.y, v.z};
}
Vec3 rot_y(const Vec3& v, double a_rad) {
  const double c = std::cos(a_rad), s = std::sin(a_rad);
  return {c * v.x + s * v.z, v.y, -s * v.x + c * v.z};
}

}  // namespace

void global_to_local(const ArrayConfig& cfg, double az_deg, double el_deg,
                     double& local_az_deg, double& local_el_deg) {
  Vec3 u = unit_dir(az_deg, el_deg);
  u = rot_z(u, -deg2rad(cfg.boresight_yaw_deg));
  u = rot_y(u, -deg2rad(cfg.mech_tilt_deg));
  dir_to_angles(u, local_az_deg, local_el_deg);
}

void local_to_global(const ArrayConfig& cfg, double local_az_deg, double local_el_deg,
                     double& az_deg, double& el_deg) {
  Vec3 u = unit_dir(local_az_deg, local_el_deg);
  u = rot_y(u, deg2rad(cfg.mech_tilt_deg));
  u = rot_z(u, deg2rad(cfg.boresight_yaw_deg));
  dir_to_angles(u, az_deg, el_deg);
}

double element_pattern_db(double az_deg, double el_deg, const ArrayConfig& cfg) {
  const double att_v =
      std::min(12.0 * (el_deg / cfg.beamwidth_el_deg) * (el_deg / cfg.beamwidth_el_deg),
               cfg.sla_db);
  const double az = wrap_deg(az_deg);
  const double att_h =
      std::min(12.0 * (az / cfg.beamwidth_az_deg) * (az / cfg.beamwidth_az_deg), cfg.am_db);
  return cfg.element_gain_dbi - std::min(att_v + att_h, cfg.am_db);
}

double element_gain_db_global(double az_deg, double el_deg, const ArrayConfig& cfg) {
  double laz, lel;
  global_to_local(cfg, az_deg, el_deg, laz, lel);
  return element_pattern_db(laz, lel, cfg);
}

std::vector<cd> steering_vector(double az_deg, double el_deg, const ArrayConfig& cfg,
                                bool with_element_gain) {
  double laz, lel;
  global_to_local(cfg, az_deg, el_deg, laz, lel);
  const Vec3 u = unit_dir(laz, lel);
  const double amp =
      with_element_gain ? std::sqrt(db2lin(element_pattern_db(laz, lel, cfg))) : 1.0;
  std::vector<cd> a(std::size_t(cfg.n()));
  for (int r = 0; r < cfg.n_rows; ++r) {
    for (int c = 0; c < cfg.n_cols; ++c) {
      const double ph = 2.0 * kPi * (cfg.dh * c * u.y + cfg.dv * r * u.z);
      a[std::size_t(r) * cfg.n_cols + c] = amp * cd{std::cos(ph), std::sin(ph)};
    }
  }
  return a;
}

RxKind rx_kind_from_string(const std::string& s) {
  if (s == "full_digital") return RxKind::full_digital;
  if (s == "hybrid") return RxKind::hybrid;
  if (s == "analog") return RxKind::analog;
  throw std::invalid_argument("rx.architecture: unknown kind '" + s + "'");
}

std::string to_string(RxKind k) {
  switch (k) {
    case RxKind::full_digital: return "full_digital";
    case RxKind::hybrid: return "hybrid";
    case RxKind::analog: return "analog";
  }
  return "?";
}

std::vector<cd> RxArchitecture::combine(std::span<const cd> elem_signal) const {
  std::vector<cd> y(std::size_t(n_rf), cd{0, 0});
  for (int c = 0; c < n_rf; ++c) {
    cd acc{0, 0};
    const cd* col = &w_rf[std::size_t(c) * n_elem];
    for (int e = 0; e < n_elem; ++e) acc += std::conj(col[e]) * elem_signal[e];
    y[c] = acc;
  }
  return y;
}

std::vector<cd> RxArchitecture::effective_steering(double az_deg, double el_deg,
                                                   const ArrayConfig& cfg,
                                                   bool with_element_gain) const {
  const auto a = steering_vector(az_deg, el_deg, cfg, with_element_gain);
  return combine(a);
}

RxArchitecture make_rx_architecture(RxKind kind, const ArrayConfig& cfg) {
  cfg.validate();
  RxArchitecture rx;
  rx.kind = kind;
  rx.n_elem = cfg.n();
  switch (kind) {
    case RxKind::full_digital: {
      rx.n_rf = rx.n_elem;
      rx.w_rf.assign(std::size_t(rx.n_elem) * rx.n_elem, cd{0, 0});
      for (int i = 0; i < rx.n_elem; ++i) rx.w_rf[std::size_t(i) * rx.n_elem + i] = 1.0;
      rx.subarray_map.resize(rx.n_elem);
      for (int i = 0; i < rx.n_elem; ++i) rx.subarray_map[i] = i;
      break;
    }
    case RxKind::hybrid: {
      if (cfg.n_rows % 2 != 0)
        throw std::invalid_argument("hybrid architecture requires an even row count");
      // two vertically adjacent elements per RF chain; phase centers spaced 2*dv
      rx.n_rf = rx.n_elem / 2;
      rx.w_rf.assign(std::size_t(rx.n_rf) * rx.n_elem, cd{0, 0});
      rx.subarray_map.assign(rx.n_elem, -1);
      const double w = 1.0 / std::sqrt(2.0);
      for (int r = 0; r < cfg.n_rows; r += 2) {
        for (int c = 0; c < cfg.n_cols; ++c) {
          const int chain = (r / 2) * cfg.n_cols + c;
          const int e0 = r * cfg.n_cols + c;
          const int e1 = (r + 1) * cfg.n_cols + c;
          rx.w_rf[std::size_t(chain) * rx.n_elem + e0] = w;
          rx.w_rf[std::size_t(chain) * rx.n_elem + e1] = w;
          rx.subarray_map[e0] = chain;
          rx.subarray_map[e1] = chain;
        }
      }
      break;
    }
    case RxKind::analog: {
      rx.n_rf = 1;
      // DFT codebook over column spatial frequencies at boresight elevation;
      // active beam is the boresight one (no sweep across occasions)
      const double inv = 1.0 / std::sqrt(double(rx.n_elem));
      for (int b = 0; b < cfg.n_cols; ++b) {
        std::vector<cd> beam(std::size_t(rx.n_elem));
        for (int r = 0; r < cfg.n_rows; ++r)
          for (int c = 0; c < cfg.n_cols; ++c) {
            const double ph = 2.0 * kPi * double(b) * c / cfg.n_cols;
            beam[std::size_t(r) * cfg.n_cols + c] = inv * cd{std::cos(ph), std::sin(ph)};
          }
        rx.codebook.push_back(std::move(beam));
      }
      rx.w_rf = rx.codebook[0];
      rx.subarray_map.assign(rx.n_elem, 0);
      break;
    }
  }
  return rx;
}

std::vector<cd> quasi_omni_precoder(const ArrayConfig& cfg) {
  cfg.validate();
  std::vector<cd> f(std::size_t(cfg.n()), cd{0, 0});
  f[0] = 1.0;  // single active element: coverage equals the element pattern
  return f;
}

}  // namespace nrs
