// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nrsense/channel.hpp"
#include "nrsense/rx.hpp"

namespace nrs {

// Fully resolved simulation scenario (all module configs plus run controls).
struct ScenarioConfig {
  PrsConfig prs;
  ArrayConfig array;
  RxKind rx_kind = RxKind::full_digital;
  ScatterParams scatter;
  BackgroundParams background;
  NoiseModel noise;
  CfarConfig cfar;
  AoaConfig aoa;
  RdParams rd;
  SectorGeometry sector;
  double rcs_mean_dbsm = -12.81;  // sigma_M
  double rcs_angular = 1.0;       // sigma_D
  double rcs_sigma_db = 3.74;     // std of the log-normal fluctuation
  int n_targets = 5;
  int n_drops = 100;
  std::uint64_t master_seed = 1;
  double association_gate_m = 20.0;
  int workers = 0;  // 0: NR_SENSE_WORKERS env or 1

  void validate() const;  // cross-module consistency (throws)
};

struct TargetTruth {
  Vec3 position;
  Vec3 velocity;
  double range_m = 0;
  double radial_velocity_mps = 0;
  double az_deg = 0, el_deg = 0;
  double rcs_m2 = 0;
};

struct DropMetrics {
  int tp = 0, fa = 0, fn = 0, gated = 0;
  std::vector<double> e_range, e_velocity, e_horizontal, e_vertical;  // per TP
};

struct DropResult {
  std::vector<Detection> detections;
  std::vector<TargetTruth> truths;
  DropMetrics metrics;
};

struct AssociationResult {
  std::vector<std::pair<int, int>> matches;  // (detection index, truth index)
  std::vector<int> unmatched_detections;
  std::vector<int> missed_truths;
};

// Greedy one-to-one nearest-neighbor association on 3D position.
AssociationResult associate(std::span<const Detection> detections,
                            std::span<const TargetTruth> truths, double gate_m);

struct Percentiles {
  double p50 = 0, p90 = 0;
};

struct AggregateMetrics {
  double pd = 0, f1 = 0;
  std::optional<double> pfa, ptp;  // absent when no drop declared detections
  int total_tp = 0, total_fa = 0, total_fn = 0;
  Percentiles range_err, velocity_err, horizontal_err, vertical_err;
};

// linear-interpolation percentile on a copy of the samples; q in [0, 100]
double percentile(std::vector<double> samples, double q);

AggregateMetrics aggregate(std::span<const DropMetrics> drops);

DropResult run_drop(const ScenarioConfig& scn, int drop_index);

// Channel paths and range-Doppler cube of one drop, for debug dumps.
struct DropArtifacts {
  std::vector<TargetTruth> truths;
  RangeDopplerCube cube;
  std::vector<PathEntry> paths;
};
DropArtifacts compute_drop_artifacts(const ScenarioConfig& scn, int drop_index);

// One Monte Carlo pass; evaluates every CFAR threshold on the same per-drop
// range-Doppler cubes (identical to rerunning with each threshold).
std::vector<std::vector<DropMetrics>> run_campaign_multi_gamma(
    const ScenarioConfig& scn, std::span<const double> gammas_db);

std::vector<DropMetrics> run_campaign(const ScenarioConfig& scn);
std::vector<DropResult> run_campaign_results(const ScenarioConfig& scn);

enum class SweepAxis { cfar_gamma, si_power, cpi_length, architecture, dv_spacing };
SweepAxis sweep_axis_from_string(const std::string& s);

struct SweepRow {
  std::string value;
  AggregateMetrics metrics;
};

// Paired-seed sweep: every value reuses the same master seed and drop indices.
std::vector<SweepRow> sweep(const ScenarioConfig& scn, SweepAxis axis,
                            std::span<const std::string> values);

}  // namespace nrs
