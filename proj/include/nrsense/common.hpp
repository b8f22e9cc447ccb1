// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>

namespace nrs {

using cd = std::complex<double>;

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kNegInfDb = -std::numeric_limits<double>::infinity();

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

// power ratios
inline double db2lin(double db) { return std::pow(10.0, db / 10.0); }
inline double lin2db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm2watt(double dbm) {
  return std::isinf(dbm) && dbm < 0 ? 0.0 : std::pow(10.0, (dbm - 30.0) / 10.0);
}
inline double watt2dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

// wrap to (-180, 180]
inline double wrap_deg(double d) {
  d = std::fmod(d, 360.0);
  if (d <= -180.0) d += 360.0;
  if (d > 180.0) d -= 360.0;
  return d;
}

struct Vec3 {
  double x = 0, y = 0, z = 0;
  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(dot(*this)); }
};

// unit direction for azimuth (from x-axis, deg) and elevation (from horizontal, deg)
inline Vec3 unit_dir(double az_deg, double el_deg) {
  const double az = deg2rad(az_deg), el = deg2rad(el_deg);
  return {std::cos(az) * std::cos(el), std::sin(az) * std::cos(el), std::sin(el)};
}

inline void dir_to_angles(const Vec3& u, double& az_deg, double& el_deg) {
  az_deg = rad2deg(std::atan2(u.y, u.x));
  double z = u.z;
  if (z > 1.0) z = 1.0;
  if (z < -1.0) z = -1.0;
  el_deg = rad2deg(std::asin(z));
}

// splitmix64 step; used to derive per-drop / per-stream seeds
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t s = master;
  splitmix64(s);
  s ^= 0x517cc1b727220a95ULL * (stream + 1);
  return splitmix64(s);
}

}  // namespace nrs
