// SPDX-License-Identifier: Apache-2.0
#include "nrsense/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace nrs {

void ScenarioConfig::validate() const {
  prs.validate();
  array.validate();
  cfar.validate();
  if (rx_kind == RxKind::hybrid && array.n_rows % 2 != 0)
    throw std::invalid_argument("scenario: hybrid architecture requires even array.n_rows");
  if (aoa.method == AoaConfig::Method::fft) {
    if (rx_kind != RxKind::full_digital)
      throw std::invalid_argument(
          "scenario: aoa.method=fft requires rx.architecture=full_digital");
    if (std::abs(array.dh - 0.5) > 1e-9 || std::abs(array.dv - 0.5) > 1e-9)
      throw std::invalid_argument(
          "scenario: aoa.method=fft requires half-wavelength spacing (use bartlett)");
  }
  if (n_targets < 0) throw std::invalid_argument("scenario: n_targets must be >= 0");
  if (n_drops < 1) throw std::invalid_argument("run: n_drops must be >= 1");
  if (association_gate_m <= 0) throw std::invalid_argument("run: association_gate_m must be > 0");
  if (sector.radius_m <= 0 || sector.halfwidth_deg <= 0 || sector.halfwidth_deg > 180)
    throw std::invalid_argument("scenario: bad sector geometry");
  if (sector.alt_max_m < sector.alt_min_m || sector.alt_min_m < 0)
    throw std::invalid_argument("scenario: bad altitude range");
}

AssociationResult associate(std::span<const Detection> detections,
                            std::span<const TargetTruth> truths, double gate_m) {
  if (gate_m <= 0) throw std::invalid_argument("associate: gate must be > 0");
  AssociationResult res;
  std::vector<bool> det_used(detections.size(), false), tru_used(truths.size(), false);
  while (true) {
    double best = gate_m;
    int bd = -1, bt = -1;
    for (std::size_t d = 0; d < detections.size(); ++d) {
      if (det_used[d]) continue;
      for (std::size_t t = 0; t < truths.size(); ++t) {
        if (tru_used[t]) continue;
        const double dist = (detections[d].position - truths[t].position).norm();
        if (dist <= best) {
          best = dist;
          bd = int(d);
          bt = int(t);
        }
      }
    }
    if (bd < 0) break;
    det_used[bd] = true;
    tru_used[bt] = true;
    res.matches.emplace_back(bd, bt);
  }
  for (std::size_t d = 0; d < detections.size(); ++d)
    if (!det_used[d]) res.unmatched_detections.push_back(int(d));
  for (std::size_t t = 0; t < truths.size(); ++t)
    if (!tru_used[t]) res.missed_truths.push_back(int(t));
  return res;
}

double percentile(std::vector<double> samples, double q) {
  if (samples.empty()) return 0.0;
  std::sort(samples.begin(), samples.end());
  const double pos = q / 100.0 * double(samples.size() - 1);
  const std::size_t lo = std::size_t(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, samples.size() - 1);
  const double frac = pos - double(lo);
  return samples[lo] * (1.0 - frac) + samples[hi] * frac;
}

AggregateMetrics aggregate(std::span<const DropMetrics> drops) {
  if (drops.empty()) throw std::invalid_argument("aggregate: need at least one drop");
  AggregateMetrics agg;
  // Neumaier-compensated sum so that averaging identical per-drop rates is
  // exact (a naive sum drifts a few ulp and breaks bit-exact reproducibility
  // of hand-computable cases).
  double pfa_sum = 0, pfa_comp = 0;
  int pfa_drops = 0;
  std::vector<double> er, ev, eh, evert;
  for (const auto& d : drops) {
    agg.total_tp += d.tp;
    agg.total_fa += d.fa;
    agg.total_fn += d.fn;
    if (d.tp + d.fa > 0) {
      const double r = double(d.fa) / double(d.tp + d.fa);
      const double s = pfa_sum + r;
      if (std::abs(pfa_sum) >= std::abs(r))
        pfa_comp += (pfa_sum - s) + r;
      else
        pfa_comp += (r - s) + pfa_sum;
      pfa_sum = s;
      ++pfa_drops;
    }
    er.insert(er.end(), d.e_range.begin(), d.e_range.end());
    ev.insert(ev.end(), d.e_velocity.begin(), d.e_velocity.end());
    eh.insert(eh.end(), d.e_horizontal.begin(), d.e_horizontal.end());
    evert.insert(evert.end(), d.e_vertical.begin(), d.e_vertical.end());
  }
  const int denom_pd = agg.total_tp + agg.total_fn;
  agg.pd = denom_pd > 0 ? double(agg.total_tp) / denom_pd : 0.0;
  const int denom_f1 = 2 * agg.total_tp + agg.total_fa + agg.total_fn;
  agg.f1 = denom_f1 > 0 ? 2.0 * agg.total_tp / denom_f1 : 0.0;
  if (pfa_drops > 0) {
    agg.pfa = (pfa_sum + pfa_comp) / pfa_drops;
    agg.ptp = 1.0 - *agg.pfa;
  }
  agg.range_err = {percentile(er, 50), percentile(er, 90)};
  agg.velocity_err = {percentile(ev, 50), percentile(ev, 90)};
  agg.horizontal_err = {percentile(eh, 50), percentile(eh, 90)};
  agg.vertical_err = {percentile(evert, 50), percentile(evert, 90)};
  return agg;
}

namespace {

struct DropCore {
  std::vector<TargetTruth> truths;
  RangeDopplerCube cube;
  std::vector<PathEntry> paths;
};

DropCore compute_drop_core(const ScenarioConfig& scn, const SensingChain& chain,
                           const PrsGrid& grid, int drop_index) {
  std::mt19937_64 rng(mix_seed(scn.master_seed, std::uint64_t(drop_index)));
  auto targets = draw_targets(scn.sector, scn.n_targets, rng);
  for (auto& t : targets) {
    t.rcs_mean_dbsm = scn.rcs_mean_dbsm;
    t.rcs_angular = scn.rcs_angular;
    t.rcs_sigma_db = scn.rcs_sigma_db;
  }
  const double lambda = scn.prs.wavelength();

  DropCore core;
  std::vector<PathEntry> paths;
  for (std::size_t q = 0; q < targets.size(); ++q) {
    const double rcs = draw_rcs(targets[q], rng);
    auto tp = target_paths(targets[q], int(q), scn.sector, rcs, scn.scatter, lambda, rng);
    paths.insert(paths.end(), tp.paths.begin(), tp.paths.end());

    TargetTruth tr;
    tr.position = targets[q].position;
    tr.velocity = targets[q].velocity;
    const Vec3 d = tr.position - scn.sector.trp_position;
    tr.range_m = d.norm();
    tr.radial_velocity_mps = radial_velocity(targets[q], scn.sector.trp_position);
    dir_to_angles(d * (1.0 / tr.range_m), tr.az_deg, tr.el_deg);
    tr.rcs_m2 = rcs;
    core.truths.push_back(tr);
  }
  auto bg = background_channel(scn.sector, scn.background, scn.prs.carrier_freq_hz, rng);
  const auto bgp = bg.all_paths();
  paths.insert(paths.end(), bgp.begin(), bgp.end());

  core.cube = chain.process(paths, grid, scn.noise, rng);
  core.paths = std::move(paths);
  return core;
}

DropMetrics score_drop(const ScenarioConfig& scn, std::span<const Detection> dets,
                       std::span<const TargetTruth> truths, int gated) {
  DropMetrics m;
  m.gated = gated;
  const auto assoc = associate(dets, truths, scn.association_gate_m);
  m.tp = int(assoc.matches.size());
  m.fa = int(assoc.unmatched_detections.size());
  m.fn = int(assoc.missed_truths.size());
  for (const auto& [di, ti] : assoc.matches) {
    const auto& d = dets[di];
    const auto& t = truths[ti];
    m.e_range.push_back(std::abs(d.range_m - t.range_m));
    // Velocity error folded into the unambiguous Doppler span lambda/(2 T):
    // targets faster than the span alias, and the estimator cannot be charged
    // for the ambiguity itself.
    const double v_span = scn.prs.wavelength() / (2.0 * scn.prs.prs_period_s);
    double dv = std::fmod(d.radial_velocity_mps - t.radial_velocity_mps, v_span);
    if (dv > 0.5 * v_span) dv -= v_span;
    if (dv < -0.5 * v_span) dv += v_span;
    m.e_velocity.push_back(std::abs(dv));
    const double dx = d.position.x - t.position.x, dy = d.position.y - t.position.y;
    m.e_horizontal.push_back(std::hypot(dx, dy));
    m.e_vertical.push_back(std::abs(d.position.z - t.position.z));
  }
  return m;
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("NR_SENSE_WORKERS")) {
    const int w = std::atoi(env);
    if (w > 0) return w;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? int(hc) : 1;
}

// runs fn(drop_index) over all drops with a worker pool
template <typename Fn>
void parallel_drops(int n_drops, int workers, Fn&& fn) {
  if (workers <= 1) {
    for (int i = 0; i < n_drops; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto worker = [&] {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= n_drops) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (!err) err = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < std::min(workers, n_drops); ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace

DropArtifacts compute_drop_artifacts(const ScenarioConfig& scn, int drop_index) {
  scn.validate();
  SensingChain chain(scn.prs, scn.array, scn.rx_kind, scn.rd);
  const auto grid = build_prs_grid(scn.prs);
  auto core = compute_drop_core(scn, chain, grid, drop_index);
  return {std::move(core.truths), std::move(core.cube), std::move(core.paths)};
}

DropResult run_drop(const ScenarioConfig& scn, int drop_index) {
  scn.validate();
  SensingChain chain(scn.prs, scn.array, scn.rx_kind, scn.rd);
  const auto grid = build_prs_grid(scn.prs);
  auto core = compute_drop_core(scn, chain, grid, drop_index);
  DropResult res;
  res.truths = std::move(core.truths);
  int gated = 0;
  res.detections = chain.detect(core.cube, scn.cfar, scn.aoa, scn.sector, &gated);
  res.metrics = score_drop(scn, res.detections, res.truths, gated);
  return res;
}

std::vector<DropResult> run_campaign_results(const ScenarioConfig& scn) {
  scn.validate();
  const SensingChain chain(scn.prs, scn.array, scn.rx_kind, scn.rd);
  const auto grid = build_prs_grid(scn.prs);
  std::vector<DropResult> results(std::size_t(scn.n_drops));
  parallel_drops(scn.n_drops, resolve_workers(scn.workers), [&](int i) {
    auto core = compute_drop_core(scn, chain, grid, i);
    DropResult r;
    r.truths = std::move(core.truths);
    int gated = 0;
    r.detections = chain.detect(core.cube, scn.cfar, scn.aoa, scn.sector, &gated);
    r.metrics = score_drop(scn, r.detections, r.truths, gated);
    results[std::size_t(i)] = std::move(r);
  });
  return results;
}

std::vector<DropMetrics> run_campaign(const ScenarioConfig& scn) {
  auto results = run_campaign_results(scn);
  std::vector<DropMetrics> out;
  out.reserve(results.size());
  for (auto& r : results) out.push_back(std::move(r.metrics));
  return out;
}

std::vector<std::vector<DropMetrics>> run_campaign_multi_gamma(
    const ScenarioConfig& scn, std::span<const double> gammas_db) {
  scn.validate();
  if (gammas_db.empty()) throw std::invalid_argument("sweep: empty value list");
  const SensingChain chain(scn.prs, scn.array, scn.rx_kind, scn.rd);
  const auto grid = build_prs_grid(scn.prs);
  std::vector<std::vector<DropMetrics>> per_gamma(
      gammas_db.size(), std::vector<DropMetrics>(std::size_t(scn.n_drops)));
  parallel_drops(scn.n_drops, resolve_workers(scn.workers), [&](int i) {
    auto core = compute_drop_core(scn, chain, grid, i);
    for (std::size_t gi = 0; gi < gammas_db.size(); ++gi) {
      CfarConfig cfar = scn.cfar;
      cfar.threshold_db = gammas_db[gi];
      int gated = 0;
      const auto dets = chain.detect(core.cube, cfar, scn.aoa, scn.sector, &gated);
      per_gamma[gi][std::size_t(i)] = score_drop(scn, dets, core.truths, gated);
    }
  });
  return per_gamma;
}

SweepAxis sweep_axis_from_string(const std::string& s) {
  if (s == "cfar_gamma") return SweepAxis::cfar_gamma;
  if (s == "si_power") return SweepAxis::si_power;
  if (s == "cpi_length") return SweepAxis::cpi_length;
  if (s == "architecture") return SweepAxis::architecture;
  if (s == "dv_spacing") return SweepAxis::dv_spacing;
  throw std::invalid_argument("sweep: unknown axis '" + s + "'");
}

std::vector<SweepRow> sweep(const ScenarioConfig& scn, SweepAxis axis,
                            std::span<const std::string> values) {
  if (values.empty()) throw std::invalid_argument("sweep: empty value list");
  std::vector<SweepRow> rows;

  if (axis == SweepAxis::cfar_gamma) {
    std::vector<double> gammas;
    for (const auto& v : values) gammas.push_back(std::stod(v));
    auto per_gamma = run_campaign_multi_gamma(scn, gammas);
    for (std::size_t i = 0; i < values.size(); ++i)
      rows.push_back({values[i], aggregate(per_gamma[i])});
    return rows;
  }

  for (const auto& v : values) {
    ScenarioConfig s = scn;
    switch (axis) {
      case SweepAxis::si_power:
        s.noise.si_power_dbm = (v == "-inf") ? kNegInfDb : std::stod(v);
        break;
      case SweepAxis::cpi_length:
        s.prs.n_cpi = std::stoi(v);
        break;
      case SweepAxis::architecture:
        s.rx_kind = rx_kind_from_string(v);
        break;
      case SweepAxis::dv_spacing:
        s.array.dv = std::stod(v);
        break;
      case SweepAxis::cfar_gamma:
        break;
    }
    rows.push_back({v, aggregate(run_campaign(s))});
  }
  return rows;
}

}  // namespace nrs
