// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nrsense/common.hpp"

namespace nrs {

// PRS numerology and comb configuration for one CPI.
struct PrsConfig {
  double carrier_freq_hz = 4e9;
  double scs_hz = 30e3;       // subcarrier spacing
  int n_subcarriers = 3264;   // 272 PRBs at 100 MHz / 30 kHz
  int comb_size = 2;          // K in {2,4,6,12}
  int n_prs_symbols = 2;      // L_PRS per occasion
  double prs_period_s = 1e-3; // T_PRS
  int n_cpi = 128;            // occasions per CPI
  double tx_power_dbm = 19.87; // per active resource element
  std::uint32_t gold_seed = 4242;

  void validate() const;  // throws std::invalid_argument

  double wavelength() const { return kSpeedOfLight / carrier_freq_hz; }
  double cpi_duration_s() const { return n_cpi * prs_period_s; }
  double bandwidth_hz() const { return n_subcarriers * scs_hz; }
  double tx_power_w() const { return dbm2watt(tx_power_dbm); }

  // staggered comb offset of PRS symbol l within an occasion
  int comb_offset(int sym) const;

  // absolute time of PRS symbol l in occasion m (CP ignored; frequency-domain model)
  double symbol_time(int sym, int occ) const {
    return occ * prs_period_s + sym / scs_hz;
  }
};

// TS 38.211 section 5.2.1 pseudo-random (Gold) sequence
std::vector<std::uint8_t> gold_sequence(std::uint32_t init, std::size_t length);

// Per-symbol scrambling init derived from (gold_seed, symbol, occasion).
std::uint32_t prs_symbol_init(std::uint32_t gold_seed, int sym, int occ);

// Dense frequency-domain PRS grid over one CPI, indexed (k, l, m).
struct PrsGrid {
  int n_sc = 0, n_sym = 0, n_occ = 0;
  int comb_size = 0;
  std::vector<cd> symbols;        // size n_sc*n_sym*n_occ
  std::vector<std::uint8_t> active;

  std::size_t idx(int k, int sym, int occ) const {
    return (std::size_t(occ) * n_sym + sym) * n_sc + k;
  }
  cd at(int k, int sym, int occ) const { return symbols[idx(k, sym, occ)]; }
  bool is_active(int k, int sym, int occ) const { return active[idx(k, sym, occ)] != 0; }
};

PrsGrid build_prs_grid(const PrsConfig& cfg);

// Eq. (1) transmit vector sqrt(P_TX) f s; f must be unit-norm.
std::vector<cd> tx_vector(cd grid_symbol, std::span<const cd> precoder,
                          double tx_power_dbm);

}  // namespace nrs
