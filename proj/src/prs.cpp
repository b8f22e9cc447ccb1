// SPDX-License-Identifier: Apache-2.0
#include "nrsense/prs.hpp"

#include <cmath>
#include <stdexcept>

namespace nrs {

void PrsConfig::validate() const {
  if (n_subcarriers <= 0) throw std::invalid_argument("prs: n_subcarriers must be > 0");
  if (scs_hz <= 0) throw std::invalid_argument("prs: scs_hz must be > 0");
  if (comb_size != 2 && comb_size != 4 && comb_size != 6 && comb_size != 12)
    throw std::invalid_argument("prs: comb_size must be one of {2,4,6,12}");
  if (n_prs_symbols < 1) throw std::invalid_argument("prs: n_prs_symbols must be >= 1");
  if (prs_period_s <= 0) throw std::invalid_argument("prs: prs_period_s must be > 0");
  if (n_cpi < 1) throw std::invalid_argument("prs: n_cpi must be >= 1");
  if (carrier_freq_hz <= 0) throw std::invalid_argument("prs: carrier_freq_hz must be > 0");
  if (n_prs_symbols / scs_hz >= prs_period_s)
    throw std::invalid_argument("prs: occasion longer than PRS period");
}

int PrsConfig::comb_offset(int sym) const {
  // NR RE-offset staggering patterns; uniform comb-phase coverage when L >= K
  static const int k2[] = {0, 1};
  static const int k4[] = {0, 2, 1, 3};
  static const int k6[] = {0, 3, 1, 4, 2, 5};
  static const int k12[] = {0, 6, 3, 9, 1, 7, 4, 10, 2, 8, 5, 11};
  const int* sched = nullptr;
  switch (comb_size) {
    case 2: sched = k2; break;
    case 4: sched = k4; break;
    case 6: sched = k6; break;
    case 12: sched = k12; break;
    default: throw std::invalid_argument("prs: bad comb_size");
  }
  return sched[sym % comb_size];
}

std::vector<std::uint8_t> gold_sequence(std::uint32_t init, std::size_t length) {
  if (length < 1) throw std::invalid_argument("gold_sequence: length must be >= 1");
  if (init >= (1u << 31)) throw std::invalid_argument("gold_sequence: init must fit in 31 bits");

  constexpr std::size_t nc = 1600;
  const std::size_t n = length + nc + 31;
  std::vector<std::uint8_t> x1(n), x2(n);
  x1[0] = 1;
  for (int i = 0; i < 31; ++i) x2[i] = (init >> i) & 1u;
  for (std::size_t i = 0; i + 31 < n; ++i) {
    x1[i + 31] = (x1[i + 3] + x1[i]) & 1u;
    x2[i + 31] = (x2[i + 3] + x2[i + 2] + x2[i + 1] + x2[i]) & 1u;
  }
  std::vector<std::uint8_t> c(length);
  for (std::size_t i = 0; i < length; ++i) c[i] = (x1[i + nc] + x2[i + nc]) & 1u;
  return c;
}

std::uint32_t prs_symbol_init(std::uint32_t gold_seed, int sym, int occ) {
  const std::uint64_t v =
      (std::uint64_t(gold_seed) << 10) + 32ull * (14ull * std::uint64_t(occ) + std::uint64_t(sym));
  return std::uint32_t(v & 0x7fffffffull);
}

PrsGrid build_prs_grid(const PrsConfig& cfg) {
  cfg.validate();
  PrsGrid g;
  g.n_sc = cfg.n_subcarriers;
  g.n_sym = cfg.n_prs_symbols;
  g.n_occ = cfg.n_cpi;
  g.comb_size = cfg.comb_size;
  g.symbols.assign(std::size_t(g.n_sc) * g.n_sym * g.n_occ, cd{0, 0});
  g.active.assign(g.symbols.size(), 0);

  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int m = 0; m < g.n_occ; ++m) {
    for (int l = 0; l < g.n_sym; ++l) {
      const int off = cfg.comb_offset(l);
      const int n_active = (g.n_sc - off + cfg.comb_size - 1) / cfg.comb_size;
      const auto c = gold_sequence(prs_symbol_init(cfg.gold_seed, l, m),
                                   std::size_t(2) * n_active);
      int i = 0;
      for (int k = off; k < g.n_sc; k += cfg.comb_size, ++i) {
        const auto id = g.idx(k, l, m);
        g.symbols[id] = cd{(1.0 - 2.0 * c[2 * i]) * inv_sqrt2,
                           (1.0 - 2.0 * c[2 * i + 1]) * inv_sqrt2};
        g.active[id] = 1;
      }
    }
  }
  return g;
}

std::vector<cd> tx_vector(cd grid_symbol, std::span<const cd> precoder,
                          double tx_power_dbm) {
  double n2 = 0;
  for (const cd& v : precoder) n2 += std::norm(v);
  if (std::abs(std::sqrt(n2) - 1.0) > 1e-9)
    throw std::invalid_argument("tx_vector: precoder must be unit-norm");
  const double amp = std::sqrt(dbm2watt(tx_power_dbm));
  std::vector<cd> out(precoder.size());
  for (std::size_t i = 0; i < precoder.size(); ++i) out[i] = amp * precoder[i] * grid_symbol;
  return out;
}

}  // namespace nrs
