#pragma once

#include <string>
#include <vector>

#include "pulsecell/solver.hpp"

namespace pulsecell {

struct BenchRow {
  int workers = 1;
  Real wall_s = 0;
  Real speedup = 1;
  Real efficiency = 1;
  bool oversubscribed = false;  // requested workers exceed hardware threads
};

struct BenchReport {
  Index nr = 0, nz = 0;
  unsigned hardware_threads = 0;
  std::string timestamp;
  std::vector<BenchRow> rows;
};

/// Times a fixed number of evolution steps per worker count, all from the same
/// initial state (uniform T0), with one untimed warm-up step. Workers=1 is
/// always measured and anchors the speedup column.
BenchReport run_benchmark(const Grid& grid, const LayerMaterials& mats,
                          SourceModel& source, const SourceSpec& timing,
                          const SolverConfig& solver_cfg,
                          std::vector<int> worker_counts, int steps,
                          Chunking chunking = Chunking::StaticBlock);

}  // namespace pulsecell
