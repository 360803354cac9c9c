#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "pulsecell/config.hpp"
#include "pulsecell/snapshot_io.hpp"

namespace pulsecell {

namespace {

std::vector<int> parse_worker_list(const std::string& s) {
  std::vector<int> out;
  size_t pos = 0;
  while (pos < s.size()) {
    size_t comma = s.find(',', pos);
    if (comma == std::string::npos) comma = s.size();
    const std::string tok = s.substr(pos, comma - pos);
    try {
      out.push_back(std::stoi(tok));
    } catch (...) {
      throw ConfigError("--workers: bad worker count '" + tok + "'");
    }
    pos = comma + 1;
  }
  if (out.empty()) throw ConfigError("--workers: empty list");
  return out;
}

const char* stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::ReachedTime: return "time";
    case StopReason::PeriodicRegime: return "periodic";
    case StopReason::TauFloor: return "tau-floor";
  }
  return "?";
}

void write_field_outputs(const Simulation& sim, const Array2& field,
                         const std::string& stem, const std::string& header) {
  write_snapshot(sim.grid, field, stem + ".csv", SnapshotFormat::Csv, header);
  write_snapshot(sim.grid, field, stem + ".vtk", SnapshotFormat::VtkStructured, header);
}

int run_simulate(Simulation& sim, const std::string& out_dir, Real t_end) {
  const std::string header = output_header(sim.cfg);
  LinePool pool(sim.cfg.exec);
  AdiStepper stepper(sim.grid, sim.layers, *sim.source_model, sim.cfg.source,
                     sim.cfg.solver, pool);
  Array2 field = make_field(sim.grid, sim.cfg.solver.T0);

  EvolutionResult res = evolve(stepper, sim.cfg.source, std::move(field), t_end,
                               sim.cfg.runner);

  write_trace(res.trace, sim.cfg.runner.probes.size(), out_dir + "/trace.csv", header);
  if (!res.detector_periods.empty())
    write_phase_trace(res.detector_periods, sim.cfg.source.t_per,
                      out_dir + "/trace_phases.csv", header);
  if (res.pre_on) write_field_outputs(sim, res.pre_on->field, out_dir + "/snapshot_pre_on", header);
  if (res.post_off)
    write_field_outputs(sim, res.post_off->field, out_dir + "/snapshot_post_off", header);
  for (size_t k = 0; k < res.at_times.size(); ++k)
    write_field_outputs(sim, res.at_times[k].field,
                        out_dir + "/snapshot_t" + std::to_string(k), header);
  write_field_outputs(sim, res.field, out_dir + "/field_final", header);

  std::printf("stop=%s t=%.12g steps=%ld", stop_reason_name(res.reason), res.t, res.steps);
  if (res.reason == StopReason::PeriodicRegime) std::printf(" fire_t=%.12g", res.fire_t);
  std::printf("\n");
  if (res.reason == StopReason::TauFloor) {
    std::fprintf(stderr, "error: %s (state dumped to field_final.*)\n", res.error.c_str());
    return 1;
  }
  return 0;
}

int run_bench(Simulation& sim, const std::string& out_dir) {
  BenchReport report = run_benchmark(sim.grid, sim.layers, *sim.source_model,
                                     sim.cfg.source, sim.cfg.solver,
                                     sim.cfg.bench.worker_counts, sim.cfg.bench.steps,
                                     sim.cfg.exec.chunking);
  write_bench_csv(report, out_dir + "/bench.csv", output_header(sim.cfg));
  std::printf("workers  wall_s    speedup  efficiency\n");
  for (const auto& row : report.rows)
    std::printf("%-8d %-9.4f %-8.3f %-8.3f%s\n", row.workers, row.wall_s, row.speedup,
                row.efficiency, row.oversubscribed ? "  (oversubscribed)" : "");
  return 0;
}

// Built-in self checks: line solver against dense elimination, pulse model
// limits, equilibrium preservation and heat conservation on a small cell.
int run_validate(const Simulation& sim) {
  int failures = 0;
  auto report = [&](const char* name, bool ok, const std::string& detail = "") {
    std::printf("%s %s%s%s\n", ok ? "PASS" : "FAIL", name, detail.empty() ? "" : ": ",
                detail.c_str());
    if (!ok) ++failures;
  };

  {
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<Real> coef(0.1, 1.0);
    Real worst = 0;
    for (int trial = 0; trial < 200; ++trial) {
      const Index n = 2 + static_cast<Index>(rng() % 63);
      TridiagonalSystem sys;
      sys.lower = Vector::Zero(n);
      sys.diag = Vector::Zero(n);
      sys.upper = Vector::Zero(n);
      sys.rhs = Vector::Zero(n);
      for (Index k = 0; k < n; ++k) {
        const Real lo = k > 0 ? coef(rng) : 0.0;
        const Real up = k < n - 1 ? coef(rng) : 0.0;
        sys.lower[k] = -lo;
        sys.upper[k] = -up;
        sys.diag[k] = lo + up + coef(rng);
        sys.rhs[k] = coef(rng) * 2 - 1;
      }
      const Vector x = thomas_solve(sys);
      Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n, n);
      for (Index k = 0; k < n; ++k) {
        dense(k, k) = sys.diag[k];
        if (k > 0) dense(k, k - 1) = sys.lower[k];
        if (k < n - 1) dense(k, k + 1) = sys.upper[k];
      }
      const Vector ref = dense.partialPivLu().solve(sys.rhs);
      worst = std::max(worst, (x - ref).cwiseAbs().maxCoeff() /
                                  std::max(1e-30, ref.cwiseAbs().maxCoeff()));
    }
    report("thomas-vs-dense", worst <= 1e-12, "max rel err " + std::to_string(worst));
  }

  {
    SourceSpec spec;
    spec.t_per = 0.1;
    spec.t_src = 0.01;
    spec.t_trs = 1e-4;
    spec.xi = 4;
    spec.zeta = 2;
    Real worst = 0;
    const int samples = 40000;
    for (int k = 0; k < samples; ++k) {
      const Real t = 3.0 * spec.t_per * k / samples;
      const Real phase = std::fmod(t, spec.t_per);
      const bool near_edge = phase <= spec.t_trs ||
                             (phase >= spec.t_src && phase <= spec.t_src + spec.t_trs);
      if (near_edge) continue;
      worst = std::max(worst, std::abs(pulse_transient(t, spec) - pulse_rect(t, spec)));
    }
    Real worst_per = 0;
    for (int k = 0; k < 2000; ++k) {
      const Real t = 3.0 * spec.t_per + spec.t_per * k / 2000.0;
      worst_per = std::max(worst_per, std::abs(pulse_transient(t + spec.t_per, spec) -
                                               pulse_transient(t, spec)));
    }
    report("pulse-limits", worst < 1e-6 && worst_per <= 1e-12,
           "edge err " + std::to_string(worst) + ", periodicity " +
               std::to_string(worst_per));
  }

  {
    MaterialSet mats;
    mats.add(MaterialTable("uniform", 2.0, PropertyTable({1, 400}, {0.7, 0.7}),
                           PropertyTable({1, 400}, {1.3, 1.3})));
    DomainSpec dom;
    dom.layer_radii = {0.5, 1.0};
    dom.core_length = 2.0;
    dom.outer_length = 1.5;
    dom.layer_materials = {"uniform", "uniform"};
    dom.source_layer = 1;
    GridSpec gs;
    gs.radial_divisions = {8, 8};
    gs.axial_divisions_core = 16;
    gs.axial_divisions_outer = 12;
    Grid grid(dom, gs);
    LayerMaterials layers = resolve_layers(mats, dom.layer_materials);
    SourceSpec timing;
    timing.t_per = 0.1;
    timing.t_src = 0.01;
    timing.t_trs = 1e-4;
    timing.S_C = 1;
    NullSource null_source;
    ExecPlan plan;
    LinePool pool(plan);

    SolverConfig cfg;
    AdiStepper stepper(grid, layers, null_source, timing, cfg, pool);
    Array2 field = make_field(grid, cfg.T0);
    Real t = 0;
    for (int k = 0; k < 50; ++k) t += stepper.step(field, t).tau_used;
    const Real drift = (field - cfg.T0).abs().maxCoeff();
    report("equilibrium", drift <= 1e-12, "max drift " + std::to_string(drift));

    SolverConfig ncfg;
    ncfg.all_neumann = true;
    AdiStepper nstepper(grid, layers, null_source, timing, ncfg, pool);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<Real> temp(4.0, 40.0);
    Array2 rnd = make_field(grid, ncfg.T0);
    for (Index i = 0; i < grid.nr(); ++i)
      for (Index j = 0; j < grid.col_extent(i); ++j) rnd(i, j) = temp(rng);
    const Real before = weighted_heat_sum(grid, layers, rnd);
    t = 0;
    for (int k = 0; k < 50; ++k) t += nstepper.step(rnd, t).tau_used;
    const Real after = weighted_heat_sum(grid, layers, rnd);
    const Real rel = std::abs(after - before) / std::abs(before);
    report("conservation", rel <= 1e-10, "relative drift " + std::to_string(rel));
  }

  (void)sim;
  return failures == 0 ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"pulsed multilayer-cylinder heat solver"};
  app.name("pulsecell");
  std::string config_path, mode_flag, workers_flag, out_flag, snapshot_flag;
  Real t_end_flag = -1;
  app.add_option("--config", config_path, "run configuration file (JSON)")->required();
  app.add_option("--mode", mode_flag, "simulate|bench|validate")
      ->check(CLI::IsMember({"simulate", "bench", "validate"}));
  app.add_option("--workers", workers_flag,
                 "worker count; comma-separated list in bench mode");
  app.add_option("--t-end", t_end_flag, "override requested end time");
  app.add_option("--out", out_flag, "override output directory");
  app.add_option("--snapshot-phase", snapshot_flag, "on|off|both|none")
      ->check(CLI::IsMember({"on", "off", "both", "none"}));

  std::vector<const char*> argv;
  argv.push_back("pulsecell");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    RunConfig cfg = parse_config(config_path);
    if (!mode_flag.empty()) {
      if (mode_flag == "simulate") cfg.mode = RunMode::Simulate;
      if (mode_flag == "bench") cfg.mode = RunMode::Bench;
      if (mode_flag == "validate") cfg.mode = RunMode::Validate;
    }
    if (!out_flag.empty()) cfg.output_dir = out_flag;
    if (t_end_flag > 0) cfg.runner.t_end = t_end_flag;
    if (!snapshot_flag.empty()) {
      cfg.runner.snapshot_pre_on = snapshot_flag == "on" || snapshot_flag == "both";
      cfg.runner.snapshot_post_off = snapshot_flag == "off" || snapshot_flag == "both";
    }
    if (!workers_flag.empty()) {
      const std::vector<int> counts = parse_worker_list(workers_flag);
      if (cfg.mode == RunMode::Bench)
        cfg.bench.worker_counts = counts;
      else
        cfg.exec.workers = counts.front();
      cfg.exec.validate();
    }

    Simulation sim(std::move(cfg));
    std::filesystem::create_directories(sim.cfg.output_dir);
    {
      std::ofstream dump(sim.cfg.output_dir + "/resolved_config.json");
      if (!dump) throw Error("cannot write resolved config");
      dump << dump_resolved(sim.cfg);
    }

    switch (sim.cfg.mode) {
      case RunMode::Simulate:
        return run_simulate(sim, sim.cfg.output_dir, sim.cfg.runner.t_end);
      case RunMode::Bench:
        return run_bench(sim, sim.cfg.output_dir);
      case RunMode::Validate:
        return run_validate(sim);
    }
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace pulsecell
