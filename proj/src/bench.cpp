#include "pulsecell/bench.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <thread>

namespace pulsecell {

namespace {

Real time_steps(const Grid& grid, const LayerMaterials& mats, SourceModel& source,
                const SourceSpec& timing, const SolverConfig& cfg, int workers,
                Chunking chunking, int steps) {
  ExecPlan plan{workers, chunking, std::nullopt};
  LinePool pool(plan);
  AdiStepper stepper(grid, mats, source, timing, cfg, pool);
  Array2 field = make_field(grid, cfg.T0);
  Real t = 0;
  t += stepper.step(field, t).tau_used;  // warm-up, untimed
  const auto begin = std::chrono::steady_clock::now();
  for (int k = 0; k < steps; ++k) t += stepper.step(field, t).tau_used;
  const auto end = std::chrono::steady_clock::now();
  return std::chrono::duration<Real>(end - begin).count();
}

}  // namespace

BenchReport run_benchmark(const Grid& grid, const LayerMaterials& mats,
                          SourceModel& source, const SourceSpec& timing,
                          const SolverConfig& solver_cfg,
                          std::vector<int> worker_counts, int steps,
                          Chunking chunking) {
  if (steps < 1) throw ConfigError("bench.steps: must be >= 1");
  for (int w : worker_counts)
    if (w < 1) throw ConfigError("bench.worker_counts: workers must be >= 1");

  worker_counts.push_back(1);
  std::sort(worker_counts.begin(), worker_counts.end());
  worker_counts.erase(std::unique(worker_counts.begin(), worker_counts.end()),
                      worker_counts.end());

  BenchReport report;
  report.nr = grid.nr();
  report.nz = grid.nz();
  report.hardware_threads = std::max(1u, std::thread::hardware_concurrency());
  {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    report.timestamp = buf;
  }

  Real wall_1 = 0;
  for (int w : worker_counts) {
    BenchRow row;
    row.workers = w;
    row.oversubscribed = static_cast<unsigned>(w) > report.hardware_threads;
    row.wall_s = time_steps(grid, mats, source, timing, solver_cfg, w, chunking, steps);
    if (w == 1) wall_1 = row.wall_s;
    row.speedup = w == 1 ? 1.0 : wall_1 / row.wall_s;
    row.efficiency = row.speedup / w;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace pulsecell
