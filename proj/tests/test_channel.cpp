// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "nrsense/channel.hpp"

using namespace nrs;

namespace {
TargetState make_target(const Vec3& pos, const Vec3& vel) {
  TargetState t;
  t.position = pos;
  t.velocity = vel;
  return t;
}
}  // namespace

TEST_CASE("monostatic radar equation amplitude") {
  // |alpha|^2 = lambda^2 sigma / ((4 pi)^3 d^4); frozen against a hand
  // calculation at d = 100 m, sigma = 1 m^2, fc = 4 GHz
  SectorGeometry geo;
  geo.trp_position = {0, 0, 0};
  std::mt19937_64 rng(1);
  ScatterParams sp;
  sp.n_scatter = 0;
  const double lambda = 299792458.0 / 4e9;
  auto t = make_target({100, 0, 0}, {0, 0, 0});
  const auto tp = target_paths(t, 0, geo, 1.0, sp, lambda, rng);
  REQUIRE(tp.paths.size() == 1);
  CHECK(std::norm(tp.paths[0].gain) == doctest::Approx(2.830687e-14).epsilon(1e-5));
  CHECK(tp.paths[0].delay_s == doctest::Approx(2.0 * 100.0 / 299792458.0).epsilon(1e-12));
  CHECK(tp.paths[0].doppler_hz == doctest::Approx(0.0));
}

TEST_CASE("amplitude follows the d^-2 round-trip law") {
  SectorGeometry geo;
  geo.trp_position = {0, 0, 0};
  ScatterParams sp;
  sp.n_scatter = 0;
  std::mt19937_64 rng(1);
  auto t1 = make_target({100, 0, 0}, {0, 0, 0});
  auto t2 = make_target({200, 0, 0}, {0, 0, 0});
  const auto p1 = target_paths(t1, 0, geo, 1.0, sp, 0.075, rng);
  const auto p2 = target_paths(t2, 0, geo, 1.0, sp, 0.075, rng);
  CHECK(std::abs(p1.paths[0].gain) / std::abs(p2.paths[0].gain) == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("radial velocity sign convention: positive when approaching") {
  const Vec3 trp{0, 0, 25};
  auto t = make_target({100, 0, 25}, {-10, 0, 0});  // flying toward the site
  CHECK(radial_velocity(t, trp) == doctest::Approx(10.0));
  t.velocity = {10, 0, 0};
  CHECK(radial_velocity(t, trp) == doctest::Approx(-10.0));
  t.velocity = {0, 10, 0};  // tangential
  CHECK(radial_velocity(t, trp) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("doppler maps radial velocity through 2 v / lambda") {
  SectorGeometry geo;
  geo.trp_position = {0, 0, 0};
  ScatterParams sp;
  sp.n_scatter = 0;
  std::mt19937_64 rng(2);
  auto t = make_target({150, 0, 0}, {-10, 0, 0});
  const double lambda = 0.075;
  const auto tp = target_paths(t, 0, geo, 1.0, sp, lambda, rng);
  CHECK(tp.paths[0].doppler_hz == doctest::Approx(2.0 * 10.0 / lambda).epsilon(1e-12));
}

TEST_CASE("rcs median equals the mean dBsm level") {
  // sigma_M = 10^(-1.281) ~ 0.052360 m^2; the log-normal term has median 1
  std::mt19937_64 rng(3);
  TargetState t;
  std::vector<double> draws(20001);
  for (auto& d : draws) d = draw_rcs(t, rng);
  std::sort(draws.begin(), draws.end());
  const double median = draws[draws.size() / 2];
  CHECK(median == doctest::Approx(0.052360).epsilon(0.08));
  // spread sanity: log-std near 3.74 dB
  double s = 0, s2 = 0;
  for (double d : draws) {
    const double db = 10.0 * std::log10(d);
    s += db;
    s2 += db * db;
  }
  const double mean = s / draws.size();
  const double std_db = std::sqrt(s2 / draws.size() - mean * mean);
  CHECK(std_db == doctest::Approx(3.74).epsilon(0.05));
}

TEST_CASE("target draws respect the sector geometry") {
  SectorGeometry geo;
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 50; ++rep) {
    const auto ts = draw_targets(geo, 5, rng);
    REQUIRE(ts.size() == 5);
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const auto& t = ts[i];
      const double horiz = std::hypot(t.position.x - geo.trp_position.x,
                                      t.position.y - geo.trp_position.y);
      CHECK(horiz <= geo.radius_m + 1e-9);
      CHECK(t.position.z >= geo.alt_min_m);
      CHECK(t.position.z <= geo.alt_max_m);
      const double az = rad2deg(std::atan2(t.position.y - geo.trp_position.y,
                                           t.position.x - geo.trp_position.x));
      CHECK(geo.azimuth_in_sector(az));
      CHECK((t.position - geo.trp_position).norm() >= geo.min_dist_m);
      for (std::size_t j = 0; j < i; ++j)
        CHECK((t.position - ts[j].position).norm() >= geo.min_dist_m);
      CHECK(t.velocity.z == doctest::Approx(0.0));
      CHECK(t.velocity.norm() <= 180.0 / 3.6 + 1e-9);
    }
  }
}

TEST_CASE("scatter rays ride on the direct path") {
  SectorGeometry geo;
  geo.trp_position = {0, 0, 0};
  ScatterParams sp;  // defaults: 4 rays
  std::mt19937_64 rng(5);
  auto t = make_target({200, 50, 60}, {-8, 3, 0});
  const auto tp = target_paths(t, 0, geo, 0.1, sp, 0.075, rng);
  REQUIRE(tp.paths.size() >= 1);
  CHECK(tp.paths.size() <= std::size_t(1 + sp.n_scatter));
  const auto& d0 = tp.paths[0];
  const double strongest = std::abs(d0.gain);
  for (std::size_t i = 1; i < tp.paths.size(); ++i) {
    const auto& s = tp.paths[i];
    CHECK(s.delay_s >= d0.delay_s);  // excess delay is nonnegative
    // kept rays sit above the relative dropping threshold
    CHECK(20.0 * std::log10(std::abs(s.gain) / strongest) >= -sp.drop_threshold_db - 1e-9);
  }
}

TEST_CASE("background clutter is strictly static") {
  SectorGeometry geo;
  BackgroundParams bp;
  std::mt19937_64 rng(6);
  const auto bg = background_channel(geo, bp, 4e9, rng);
  REQUIRE(int(bg.rps.size()) == bp.n_rp);
  const auto paths = bg.all_paths();
  CHECK(int(paths.size()) == bp.n_rp * bp.n_clusters);
  for (const auto& p : paths) CHECK(p.doppler_hz == 0.0);
  for (const auto& rp : bg.rps) {
    const double horiz = std::hypot(rp.position.x - geo.trp_position.x,
                                    rp.position.y - geo.trp_position.y);
    CHECK(horiz >= bp.dist_min_m - 1e-9);
    CHECK(horiz <= bp.dist_max_m + 1e-9);
    CHECK(rp.position.z >= bp.height_min_m);
    CHECK(rp.position.z <= bp.height_max_m);
    CHECK(rp.pathloss_db > 0);
  }
}

TEST_CASE("background power scales with the path loss law") {
  // uma_nlos at 60 m, 4 GHz: 13.54 + 39.08 log10(60) + 20 log10(4)
  const double pl = pathloss_db(PathlossLaw::uma_nlos, 60.0, 4e9);
  CHECK(pl == doctest::Approx(13.54 + 39.08 * std::log10(60.0) + 20.0 * std::log10(4.0)).epsilon(1e-12));
  const double fs = pathloss_db(PathlossLaw::free_space, 100.0, 4e9);
  CHECK(fs == doctest::Approx(20.0 * std::log10(4.0 * kPi * 100.0 * 4e9 / 299792458.0)).epsilon(1e-12));
}

TEST_CASE("noise variance follows kT F B") {
  NoiseModel nm;
  // -174 dBm/Hz + 5 dB over 30 kHz: -124.23 dBm
  const double expect_dbm = -174.0 + 5.0 + 10.0 * std::log10(30e3);
  CHECK(watt2dbm(nm.noise_variance_w(30e3)) == doctest::Approx(expect_dbm).epsilon(1e-9));
  nm.thermal_enabled = false;
  CHECK(nm.noise_variance_w(30e3) == 0.0);
  NoiseModel si;
  CHECK(si.si_variance_w() == 0.0);  // -inf default
  si.si_power_dbm = -100.0;
  CHECK(watt2dbm(si.si_variance_w()) == doctest::Approx(-100.0));
}

TEST_CASE("identical seeds reproduce identical channels") {
  SectorGeometry geo;
  ScatterParams sp;
  std::mt19937_64 a(42), b(42);
  auto t = make_target({100, 40, 50}, {5, -5, 0});
  const auto p1 = target_paths(t, 0, geo, 0.05, sp, 0.075, a);
  const auto p2 = target_paths(t, 0, geo, 0.05, sp, 0.075, b);
  REQUIRE(p1.paths.size() == p2.paths.size());
  for (std::size_t i = 0; i < p1.paths.size(); ++i) {
    CHECK(p1.paths[i].gain == p2.paths[i].gain);
    CHECK(p1.paths[i].delay_s == p2.paths[i].delay_s);
  }
}
