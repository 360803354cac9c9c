#pragma once

#include <string>
#include <vector>

#include "pulsecell/bench.hpp"
#include "pulsecell/geometry.hpp"
#include "pulsecell/runner.hpp"
#include "pulsecell/types.hpp"

namespace pulsecell {

enum class SnapshotFormat { Csv, VtkStructured };

struct SnapshotRow {
  Real r = 0, z = 0;
  int layer = 0;
  Real T = 0;
};

/// CSV: one row (r, z, layer, T) per masked cell, z-major, full precision.
/// VTK legacy structured grid: full tensor grid with out-of-mask temperatures
/// blanked as NaN plus mask and layer point arrays.
void write_snapshot(const Grid& grid, const Array2& field, const std::string& path,
                    SnapshotFormat format, const std::string& header);

std::vector<SnapshotRow> read_snapshot_csv(const std::string& path);

/// CSV columns t, probe_1..probe_k; one row per accepted step.
void write_trace(const std::vector<TraceEntry>& trace, size_t probe_count,
                 const std::string& path, const std::string& header);

/// Companion file with the detector's phase-resampled periods:
/// columns period, phase_index, phase_t, value.
void write_phase_trace(const std::vector<Vector>& periods, Real t_per,
                       const std::string& path, const std::string& header);

/// CSV columns workers, wall_s, speedup, efficiency.
void write_bench_csv(const BenchReport& report, const std::string& path,
                     const std::string& header);

}  // namespace pulsecell
