// SPDX-License-Identifier: Apache-2.0
//
// nrsense: Monte Carlo gNB monostatic sensing simulator.
//
//   nrsense run   --config scenario.cfg --out results/ [--drops N] [--seed S]
//   nrsense sweep --axis cfar_gamma --values 14,16,18,20,22 --out results/
//   nrsense selftest [--fast]
//
// Exit codes: 0 ok, 1 malformed config, 2 runtime failure, 3 selftest failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nrsense/config.hpp"
#include "nrsense/io.hpp"

namespace fs = std::filesystem;
using namespace nrs;

namespace {

double now_s() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

struct CommonOpts {
  std::string config_path;
  std::string out_dir = "out";
  int drops = -1;
  long long seed = -1;
  int workers = -1;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* app, CommonOpts& o) {
  app->add_option("--config", o.config_path, "scenario config file (.cfg or manifest .json)");
  app->add_option("--out", o.out_dir, "output directory");
  app->add_option("--drops", o.drops, "override run.n_drops");
  app->add_option("--seed", o.seed, "override run.master_seed");
  app->add_option("--workers", o.workers, "worker threads (0 = auto)");
  app->add_option("--override", o.overrides, "config override key=value (repeatable)");
}

ScenarioConfig build_scenario(const CommonOpts& o) {
  KvMap kv;
  if (!o.config_path.empty()) kv = load_config_file(o.config_path);
  apply_overrides(kv, o.overrides);
  ScenarioConfig scn = scenario_from_kv(kv);
  if (o.drops >= 0) scn.n_drops = o.drops;
  if (o.seed >= 0) scn.master_seed = std::uint64_t(o.seed);
  if (o.workers >= 0) scn.workers = o.workers;
  scn.validate();
  return scn;
}

int cmd_run(const CommonOpts& o, int dump_rd_drop, int dump_prs, int dump_paths_drop) {
  const ScenarioConfig scn = build_scenario(o);
  fs::create_directories(o.out_dir);
  const fs::path out(o.out_dir);

  std::map<std::string, double> timings;
  const double t0 = now_s();
  const std::vector<DropResult> results = run_campaign_results(scn);
  timings["campaign"] = now_s() - t0;

  const double t1 = now_s();
  std::vector<DropMetrics> drops;
  drops.reserve(results.size());
  for (const auto& r : results) drops.push_back(r.metrics);
  const AggregateMetrics agg = aggregate(drops);

  write_metrics_json((out / "metrics.json").string(), agg, drops);
  write_drops_csv((out / "drops.csv").string(), drops);
  write_errors_csv((out / "errors.csv").string(), drops);
  write_detections_csv((out / "detections.csv").string(), results);

  if (dump_rd_drop >= 0) {
    const DropArtifacts art = compute_drop_artifacts(scn, dump_rd_drop);
    dump_rd_raster((out / ("rd_drop" + std::to_string(dump_rd_drop))).string(), art.cube);
  }
  if (dump_paths_drop >= 0) {
    const DropArtifacts art = compute_drop_artifacts(scn, dump_paths_drop);
    dump_paths_json((out / ("paths_drop" + std::to_string(dump_paths_drop) + ".json")).string(),
                    art.paths);
  }
  if (dump_prs) dump_prs_grid((out / "prs_grid").string(), build_prs_grid(scn.prs));
  timings["io"] = now_s() - t1;
  write_manifest((out / "manifest.json").string(), scn, timings);

  std::printf("drops=%zu pd=%.4f pfa=%s f1=%.4f tp=%d fa=%d fn=%d\n", results.size(),
              agg.pd, agg.pfa ? std::to_string(*agg.pfa).c_str() : "n/a", agg.f1,
              agg.total_tp, agg.total_fa, agg.total_fn);
  return 0;
}

int cmd_sweep(const CommonOpts& o, const std::string& axis_s, const std::string& values_s) {
  const ScenarioConfig scn = build_scenario(o);
  const SweepAxis axis = sweep_axis_from_string(axis_s);
  std::vector<std::string> values;
  std::stringstream ss(values_s);
  for (std::string tok; std::getline(ss, tok, ',');)
    if (!tok.empty()) values.push_back(tok);
  if (values.empty()) throw std::invalid_argument("sweep: --values is empty");

  fs::create_directories(o.out_dir);
  const fs::path out(o.out_dir);
  std::map<std::string, double> timings;
  const double t0 = now_s();
  const std::vector<SweepRow> rows = sweep(scn, axis, values);
  timings["sweep"] = now_s() - t0;

  write_sweep_csv((out / "sweep.csv").string(), rows);
  if (axis == SweepAxis::cfar_gamma) {
    std::vector<double> gammas;
    std::vector<AggregateMetrics> mets;
    for (const auto& r : rows) {
      gammas.push_back(std::stod(r.value));
      mets.push_back(r.metrics);
    }
    write_roc_csv((out / "roc.csv").string(), gammas, mets);
  }
  write_manifest((out / "manifest.json").string(), scn, timings);
  for (const auto& r : rows)
    std::printf("%s: pd=%.4f pfa=%s f1=%.4f\n", r.value.c_str(), r.metrics.pd,
                r.metrics.pfa ? std::to_string(*r.metrics.pfa).c_str() : "n/a",
                r.metrics.f1);
  return 0;
}

bool check(const char* name, bool ok) {
  std::printf("[%s] %s\n", ok ? "pass" : "FAIL", name);
  return ok;
}

int cmd_selftest(bool fast) {
  bool all = true;

  // 1. single-target range/velocity bin oracle
  {
    ScenarioConfig scn;
    scn.prs.n_subcarriers = fast ? 1024 : 3264;
    scn.prs.n_cpi = fast ? 64 : 128;
    scn.scatter.n_scatter = 0;

    SensingChain chain(scn.prs, scn.array, RxKind::full_digital, scn.rd);
    TargetState t;
    const double r0 = 150.0, vr = 10.0;
    t.position = scn.sector.trp_position + unit_dir(20.0, 15.0) * r0;
    const Vec3 u = unit_dir(20.0, 15.0);
    t.velocity = u * -vr;  // toward the TRP
    std::mt19937_64 rng(7);
    TargetPaths tp = target_paths(t, 0, scn.sector, 1.0, scn.scatter,
                                  scn.prs.wavelength(), rng);
    const PrsGrid grid = build_prs_grid(scn.prs);
    const RangeDopplerCube cube = chain.process(tp.paths, grid, scn.noise, rng);
    const auto dets = chain.detect(cube, scn.cfar, scn.aoa, scn.sector);
    bool ok = dets.size() == 1;
    if (ok) {
      ok = std::abs(dets[0].range_m - r0) <= 2.0 * chain.range_per_bin() &&
           std::abs(dets[0].radial_velocity_mps - vr) <= chain.velocity_per_bin();
    }
    all &= check("single-target range/velocity oracle", ok);
  }

  // 2. CA-CFAR false-alarm rate on pure noise
  {
    const int nb = fast ? 256 : 512, nd = fast ? 256 : 512;
    CfarConfig cf;
    cf.threshold_db = 7.0;
    cf.nms_range = cf.nms_doppler = 0;
    std::mt19937_64 rng(11);
    std::exponential_distribution<double> expo(1.0);
    std::vector<double> p(std::size_t(nb) * nd);
    for (auto& v : p) v = expo(rng);
    const auto peaks = cfar_detect(p, nb, nd, cf);
    const int n_t = (2 * cf.train_range + 2 * cf.guard_range + 1) *
                        (2 * cf.train_doppler + 2 * cf.guard_doppler + 1) -
                    (2 * cf.guard_range + 1) * (2 * cf.guard_doppler + 1);
    const double g = db2lin(cf.threshold_db);
    const double pfa_theory = std::pow(1.0 + g / n_t, -n_t);
    const double pfa_emp = double(peaks.size()) / (double(nb) * nd);
    all &= check("cfar noise-floor false-alarm rate",
                 pfa_emp > 0.25 * pfa_theory && pfa_emp < 4.0 * pfa_theory);
  }

  // 3. static clutter null after slow-time mean subtraction
  {
    ScenarioConfig scn;
    scn.prs.n_subcarriers = 512;
    scn.prs.n_cpi = 32;
    scn.noise.thermal_enabled = false;
    SensingChain chain(scn.prs, scn.array, RxKind::full_digital, scn.rd);
    std::mt19937_64 rng(3);
    const BackgroundRealization bg =
        background_channel(scn.sector, scn.background, scn.prs.carrier_freq_hz, rng);
    const PrsGrid grid = build_prs_grid(scn.prs);
    const RangeDopplerCube cube = chain.process(bg.all_paths(), grid, scn.noise, rng);
    double pmax = 0;
    for (double v : cube.power) pmax = std::max(pmax, v);
    all &= check("static clutter null", pmax < 1e-25 || lin2db(pmax) < -250.0);
  }

  if (!all) return 3;
  std::printf("selftest ok\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nrsense: 5G NR PRS monostatic sensing Monte Carlo simulator"};
  app.require_subcommand(1);

  CommonOpts run_o, sweep_o;
  int dump_rd = -1, dump_paths = -1;
  bool dump_prs = false;
  auto* run = app.add_subcommand("run", "run a Monte Carlo campaign");
  add_common(run, run_o);
  run->add_option("--dump-rd", dump_rd, "dump the range-Doppler raster of drop INDEX");
  run->add_option("--dump-paths", dump_paths, "dump the channel paths of drop INDEX");
  run->add_flag("--dump-prs", dump_prs, "dump the transmitted PRS grid");

  std::string axis, values;
  auto* sw = app.add_subcommand("sweep", "paired-seed parameter sweep");
  add_common(sw, sweep_o);
  sw->add_option("--axis", axis, "cfar_gamma | si_power | cpi_length | architecture | dv_spacing")
      ->required();
  sw->add_option("--values", values, "comma-separated axis values")->required();

  bool fast = false;
  auto* st = app.add_subcommand("selftest", "run built-in consistency checks");
  st->add_flag("--fast", fast, "reduced problem sizes");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_o, dump_rd, dump_prs ? 1 : 0, dump_paths);
    if (sw->parsed()) return cmd_sweep(sweep_o, axis, values);
    if (st->parsed()) return cmd_selftest(fast);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
