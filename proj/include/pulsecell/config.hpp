#pragma once

#include <memory>
#include <string>

#include "pulsecell/bench.hpp"
#include "pulsecell/geometry.hpp"
#include "pulsecell/materials.hpp"
#include "pulsecell/parallel.hpp"
#include "pulsecell/runner.hpp"
#include "pulsecell/solver.hpp"
#include "pulsecell/source.hpp"

namespace pulsecell {

enum class RunMode { Simulate, Bench, Validate };

struct BenchConfig {
  std::vector<int> worker_counts{1, 2, 4};
  int steps = 30;
};

/// Full run description, one JSON file with a section per subsystem.
/// Unknown keys are rejected; defaults are filled at parse time.
struct RunConfig {
  RunMode mode = RunMode::Simulate;
  std::string output_dir;  // empty -> $PULSECELL_OUT or "out"
  DomainSpec domain;
  GridSpec grid;
  std::string materials_file;  // resolved against the config file's directory
  SourceSpec source;
  SolverConfig solver;
  RunnerConfig runner;
  ExecPlan exec;
  BenchConfig bench;
};

RunConfig parse_config(const std::string& path);
/// Parses config text; relative material paths resolve against base_dir.
RunConfig parse_config_text(const std::string& text, const std::string& base_dir);

/// Canonical resolved-config JSON; parsing it again yields an identical config.
std::string dump_resolved(const RunConfig& cfg);
std::uint64_t config_hash(const RunConfig& cfg);

/// Header comment stamped on every output file.
std::string output_header(const RunConfig& cfg);

MaterialSet load_materials(const std::string& path);

/// Grid, materials and checked wiring for one run.
struct Simulation {
  RunConfig cfg;
  Grid grid;
  MaterialSet materials;
  LayerMaterials layers;
  std::unique_ptr<SourceModel> source_model;

  Simulation(RunConfig run_cfg);
};

/// In-process CLI entry point (the binary's main forwards here).
int run_cli(const std::vector<std::string>& args);

}  // namespace pulsecell
