// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <vector>

#include "nrsense/common.hpp"

namespace nrs {

// URA geometry and TR 38.901-style element pattern parameters.
// Element n = row * n_cols + col sits at (0, col*dh, row*dv) in wavelengths,
// boresight along local +x.
struct ArrayConfig {
  int n_rows = 8, n_cols = 8;
  double dh = 0.5, dv = 0.5;  // spacings in wavelengths
  double boresight_yaw_deg = 30.0;
  double mech_tilt_deg = 0.0;  // positive tilts boresight downward
  double element_gain_dbi = 8.0;
  double beamwidth_az_deg = 65.0, beamwidth_el_deg = 65.0;
  double sla_db = 30.0, am_db = 30.0;

  int n() const { return n_rows * n_cols; }
  void validate() const;
};

// global <-> local (array-frame) direction conversion
void global_to_local(const ArrayConfig& cfg, double az_deg, double el_deg,
                     double& local_az_deg, double& local_el_deg);
void local_to_global(const ArrayConfig& cfg, double local_az_deg, double local_el_deg,
                     double& az_deg, double& el_deg);

// Element gain in dB at LOCAL angles (az from boresight, el from horizontal).
double element_pattern_db(double az_deg, double el_deg, const ArrayConfig& cfg);

// Element gain at GLOBAL angles (rotated by yaw/tilt).
double element_gain_db_global(double az_deg, double el_deg, const ArrayConfig& cfg);

// Array response at GLOBAL angles; amplitude carries sqrt of the linear
// element gain unless with_element_gain is false (pure phase model).
std::vector<cd> steering_vector(double az_deg, double el_deg, const ArrayConfig& cfg,
                                bool with_element_gain = true);

enum class RxKind { full_digital, hybrid, analog };

RxKind rx_kind_from_string(const std::string& s);
std::string to_string(RxKind k);

// Analog combining W_RF (N x N_RF, column-major, orthonormal columns).
struct RxArchitecture {
  RxKind kind = RxKind::full_digital;
  int n_elem = 0;
  int n_rf = 0;
  std::vector<cd> w_rf;           // column-major [chain][element]
  std::vector<int> subarray_map;  // element -> chain (hybrid), else identity/-1
  std::vector<std::vector<cd>> codebook;  // analog only

  cd w(int elem, int chain) const { return w_rf[std::size_t(chain) * n_elem + elem]; }

  // y = W_RF^H x
  std::vector<cd> combine(std::span<const cd> elem_signal) const;

  // W_RF^H a(az, el) at global angles
  std::vector<cd> effective_steering(double az_deg, double el_deg,
                                     const ArrayConfig& cfg,
                                     bool with_element_gain = true) const;
};

RxArchitecture make_rx_architecture(RxKind kind, const ArrayConfig& cfg);

// Unit-norm transmit weights with quasi-omni sector coverage (single active element).
std::vector<cd> quasi_omni_precoder(const ArrayConfig& cfg);

}  // namespace nrs
