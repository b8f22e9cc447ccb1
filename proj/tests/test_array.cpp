// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nrsense/array.hpp"

using namespace nrs;

TEST_CASE("element pattern follows the parabolic model with floors") {
  ArrayConfig cfg;
  CHECK(element_pattern_db(0, 0, cfg) == doctest::Approx(8.0));
  // half the 3 dB beamwidth in azimuth: 12*(32.5/65)^2 = 3 dB down
  CHECK(element_pattern_db(32.5, 0, cfg) == doctest::Approx(5.0));
  CHECK(element_pattern_db(0, 32.5, cfg) == doctest::Approx(5.0));
  // diagonal attenuations add until the overall floor
  CHECK(element_pattern_db(32.5, 32.5, cfg) == doctest::Approx(2.0));
  // far sidelobe: capped at Am below peak
  CHECK(element_pattern_db(180.0, 0, cfg) == doctest::Approx(8.0 - 30.0));
  CHECK(element_pattern_db(0, 90.0, cfg) == doctest::Approx(8.0 - 12.0 * (90.0 / 65.0) * (90.0 / 65.0)));
}

TEST_CASE("yaw rotation maps boresight to local zero") {
  ArrayConfig cfg;
  cfg.boresight_yaw_deg = 30.0;
  double laz, lel;
  global_to_local(cfg, 30.0, 0.0, laz, lel);
  CHECK(laz == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(lel == doctest::Approx(0.0).epsilon(1e-12));
  global_to_local(cfg, 50.0, 0.0, laz, lel);
  CHECK(laz == doctest::Approx(20.0));
  double gaz, gel;
  local_to_global(cfg, 20.0, 10.0, gaz, gel);
  global_to_local(cfg, gaz, gel, laz, lel);
  CHECK(laz == doctest::Approx(20.0).epsilon(1e-10));
  CHECK(lel == doctest::Approx(10.0).epsilon(1e-10));
}

TEST_CASE("mechanical tilt moves the elevation reference") {
  ArrayConfig cfg;
  cfg.boresight_yaw_deg = 0.0;
  cfg.mech_tilt_deg = 10.0;  // boresight tilted 10 degrees downward
  double laz, lel;
  global_to_local(cfg, 0.0, -10.0, laz, lel);
  CHECK(laz == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(lel == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("steering vector phase progression on a half-wavelength ULA row") {
  ArrayConfig cfg;
  cfg.n_rows = 1;
  cfg.n_cols = 4;
  cfg.boresight_yaw_deg = 0.0;
  const double az = 20.0, el = 0.0;
  const auto a = steering_vector(az, el, cfg, /*with_element_gain=*/false);
  REQUIRE(a.size() == 4);
  const double expected = 2.0 * kPi * 0.5 * std::sin(deg2rad(az));
  for (int c = 1; c < 4; ++c) {
    const double dphi = std::arg(a[c] * std::conj(a[c - 1]));
    CHECK(dphi == doctest::Approx(expected).epsilon(1e-10));
  }
  for (const auto& v : a) CHECK(std::abs(v) == doctest::Approx(1.0));
}

TEST_CASE("steering vector is constant across a row at boresight elevation 90") {
  ArrayConfig cfg;
  cfg.boresight_yaw_deg = 0.0;
  // at zenith the horizontal projection vanishes; only rows see phase
  const auto a = steering_vector(0.0, 90.0, cfg, false);
  const double col_phase = std::arg(a[1] * std::conj(a[0]));
  CHECK(col_phase == doctest::Approx(0.0).epsilon(1e-9));
  const double row_phase = std::arg(a[cfg.n_cols] * std::conj(a[0]));
  CHECK(row_phase == doctest::Approx(2.0 * kPi * 0.5).epsilon(1e-9));
}

TEST_CASE("full digital architecture is the identity") {
  ArrayConfig cfg;
  const auto rx = make_rx_architecture(RxKind::full_digital, cfg);
  CHECK(rx.n_rf == 64);
  std::vector<cd> x(64);
  for (int i = 0; i < 64; ++i) x[i] = cd(i, -i);
  const auto y = rx.combine(x);
  for (int i = 0; i < 64; ++i) CHECK(std::abs(y[i] - x[i]) < 1e-12);
}

TEST_CASE("hybrid architecture equals a virtual half-height array") {
  ArrayConfig cfg;  // 8x8
  const auto rx = make_rx_architecture(RxKind::hybrid, cfg);
  CHECK(rx.n_rf == 32);
  const double az = 37.0, el = 12.0;
  const auto eff = rx.effective_steering(az, el, cfg);
  const auto a = steering_vector(az, el, cfg);
  const double w = 1.0 / std::sqrt(2.0);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 8; ++c) {
      const cd expect = w * (a[(2 * r) * 8 + c] + a[(2 * r + 1) * 8 + c]);
      CHECK(std::abs(eff[r * 8 + c] - expect) < 1e-12);
    }
}

TEST_CASE("hybrid requires an even row count") {
  ArrayConfig cfg;
  cfg.n_rows = 7;
  CHECK_THROWS_AS(make_rx_architecture(RxKind::hybrid, cfg), std::invalid_argument);
}

TEST_CASE("architecture columns are orthonormal") {
  ArrayConfig cfg;
  for (RxKind k : {RxKind::full_digital, RxKind::hybrid, RxKind::analog}) {
    const auto rx = make_rx_architecture(k, cfg);
    for (int i = 0; i < rx.n_rf; ++i)
      for (int j = 0; j < rx.n_rf; ++j) {
        cd dot{0, 0};
        for (int e = 0; e < rx.n_elem; ++e) dot += std::conj(rx.w(e, i)) * rx.w(e, j);
        CHECK(std::abs(dot - (i == j ? cd{1, 0} : cd{0, 0})) < 1e-10);
      }
  }
}

TEST_CASE("analog architecture has a single chain") {
  ArrayConfig cfg;
  const auto rx = make_rx_architecture(RxKind::analog, cfg);
  CHECK(rx.n_rf == 1);
  CHECK_FALSE(rx.codebook.empty());
}

TEST_CASE("quasi omni precoder is unit norm") {
  ArrayConfig cfg;
  const auto f = quasi_omni_precoder(cfg);
  double n2 = 0;
  for (const auto& v : f) n2 += std::norm(v);
  CHECK(n2 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("string round trips") {
  for (RxKind k : {RxKind::full_digital, RxKind::hybrid, RxKind::analog})
    CHECK(rx_kind_from_string(to_string(k)) == k);
  CHECK_THROWS_AS(rx_kind_from_string("nope"), std::invalid_argument);
}
