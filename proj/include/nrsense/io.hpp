// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "nrsense/config.hpp"
#include "nrsense/eval.hpp"

namespace nrs {

inline constexpr const char* kVersion = "0.1.0";

// All writers are deterministic byte-for-byte for identical inputs.

void write_metrics_json(const std::string& path, const AggregateMetrics& agg,
                        std::span<const DropMetrics> drops);
void write_drops_csv(const std::string& path, std::span<const DropMetrics> drops);
void write_errors_csv(const std::string& path, std::span<const DropMetrics> drops);
void write_detections_csv(const std::string& path, std::span<const DropResult> drops);
void write_roc_csv(const std::string& path, std::span<const double> gammas_db,
                   std::span<const AggregateMetrics> rows);
void write_sweep_csv(const std::string& path, std::span<const SweepRow> rows);

// Resolved-config manifest; rerunnable via the CLI (--config manifest.json).
void write_manifest(const std::string& path, const ScenarioConfig& scn,
                    const std::map<std::string, double>& timings_s);

// little-endian float32 power raster [bin][nu] + JSON sidecar with the axes
void dump_rd_raster(const std::string& stem, const RangeDopplerCube& cube);

// little-endian complex64 raster over (k, sym, occasion) + JSON sidecar
void dump_prs_grid(const std::string& stem, const PrsGrid& grid);

void dump_paths_json(const std::string& path, std::span<const PathEntry> paths);

}  // namespace nrs
