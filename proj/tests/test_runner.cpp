#include <doctest.h>

#include <cmath>

#include "pulsecell/runner.hpp"

using namespace pulsecell;

namespace {

struct SmallCell {
  static DomainSpec make_domain() {
    DomainSpec d;
    d.layer_radii = {0.5, 0.8, 1.0};
    d.core_length = 2.0;
    d.outer_length = 1.5;
    d.layer_materials = {"core", "mid", "skin"};
    d.source_layer = 1;
    return d;
  }
  static GridSpec make_gridspec() {
    GridSpec g;
    g.radial_divisions = {6, 5, 4};
    g.axial_divisions_core = 8;
    g.axial_divisions_outer = 6;
    return g;
  }
  static MaterialSet make_materials() {
    MaterialSet set;
    auto lin = [](Real a, Real b) { return PropertyTable({0.0, 400.0}, {a, b}); };
    set.add(MaterialTable("core", 2.0, lin(1.0, 1.4), lin(8.0, 8.0)));
    set.add(MaterialTable("mid", 1.0, lin(1.0, 1.4), lin(0.4, 0.4), lin(3.0, 3.0)));
    set.add(MaterialTable("skin", 1.5, lin(1.0, 1.4), lin(1.0, 1.0)));
    return set;
  }

  DomainSpec domain = make_domain();
  MaterialSet materials = make_materials();
  Grid grid{make_domain(), make_gridspec()};
  LayerMaterials layers = resolve_layers(materials, domain.layer_materials);
  SourceSpec timing;

  SmallCell() {
    timing.t_per = 0.02;
    timing.t_src = 0.002;
    timing.t_trs = 2e-5;
    timing.I0 = 0.0;
    timing.S_C = domain.source_cross_section();
    timing.waveform = Waveform::Rectangular;
  }
};

Vector phase_row(int samples, Real (*f)(Real)) {
  Vector v(samples);
  for (int q = 0; q < samples; ++q) v[q] = f(static_cast<Real>(q) / samples);
  return v;
}

}  // namespace

TEST_CASE("batch detector on synthetic period rows") {
  RegimeDetectorConfig cfg;
  cfg.samples_per_period = 16;
  cfg.tolerance = 1e-3;
  cfg.min_periods = 2;

  auto wave = [](Real phase) { return 10.0 + std::sin(6.283185307 * phase); };
  std::vector<Vector> rows;
  for (int p = 0; p < 2; ++p) rows.push_back(phase_row(16, wave));
  CHECK_FALSE(detect_periodic(rows, cfg));  // needs min_periods+1 rows
  rows.push_back(phase_row(16, wave));
  CHECK(detect_periodic(rows, cfg));

  // Constant rows are trivially periodic.
  std::vector<Vector> flat(4, Vector::Constant(16, 4.2));
  CHECK(detect_periodic(flat, cfg));

  // Linear drift of 2*tolerance per period never settles.
  std::vector<Vector> drift;
  for (int p = 0; p < 6; ++p)
    drift.push_back(Vector::Constant(16, 4.2 + 2.0 * cfg.tolerance * p));
  CHECK_FALSE(detect_periodic(drift, cfg));

  // Shift by whole periods leaves the verdict unchanged.
  std::vector<Vector> shifted(rows.begin() + 1, rows.end());
  shifted.push_back(rows.back());
  CHECK(detect_periodic(shifted, cfg) == detect_periodic(rows, cfg));
}

TEST_CASE("incremental detector fires once the transient decays") {
  const Real t_per = 1.0;
  RegimeDetectorConfig cfg;
  cfg.samples_per_period = 32;
  cfg.tolerance = 1e-3;
  cfg.min_periods = 2;
  RegimeDetector det(t_per, cfg);

  // A e^{-t/tau_relax} plus a periodic steady part.
  const Real A = 1.0, tau_relax = 1.0;
  auto trace = [&](Real t) {
    return 10.0 + A * std::exp(-t / tau_relax) + 0.5 * std::sin(6.283185307 * t);
  };
  det.seed(0.0, trace(0.0));
  Real fired_at = -1;
  for (int k = 1; k <= 40000; ++k) {
    const Real t = k * 5e-4 * t_per;
    if (det.update(t, trace(t))) {
      fired_at = t;
      break;
    }
  }
  REQUIRE(fired_at > 0);
  // The pair ending at period n passes once A e^{-(n-1)}(1 - e^{-1}) < tol;
  // firing needs min_periods consecutive passing pairs.
  const Real settle = 1.0 + std::log(A * (1.0 - std::exp(-1.0)) / cfg.tolerance);
  CHECK(fired_at >= settle);
  CHECK(fired_at <= std::ceil(settle) + 2.0 * t_per + 1e-9);
}

TEST_CASE("phase resampler interpolates linearly") {
  PhaseResampler rs(1.0, 4);
  rs.seed(0.0, 0.0);
  // Trace v(t) = 3t sampled unevenly.
  for (Real t : {0.3, 0.45, 1.1, 1.6, 2.05}) rs.feed(t, 3.0 * t);
  REQUIRE(rs.periods().size() == 2);
  for (int p = 0; p < 2; ++p)
    for (int q = 0; q < 4; ++q) {
      const Real phase_t = p + 0.25 * q;
      CHECK(rs.periods()[p][q] == doctest::Approx(3.0 * phase_t).epsilon(1e-12));
    }
}

TEST_CASE("probe picks the nearest in-mask center") {
  SmallCell cell;
  const Grid& g = cell.grid;
  Array2 f = make_field(g, 0.0);
  for (Index i = 0; i < g.nr(); ++i)
    for (Index j = 0; j < g.col_extent(i); ++j) f(i, j) = 100.0 * i + j;

  // Exact center coordinates hit that cell.
  CHECK(probe_value(g, f, g.r_center(3), g.z_center(2)) == f(3, 2));
  // Outer surface probe lands in the last radial cell of the first row.
  CHECK(probe_value(g, f, 0.999, 0.0) == f(g.nr() - 1, 0));
  // On the axis the first radial cell is nearest.
  CHECK(probe_value(g, f, 0.0, g.z_center(1)) == f(0, 1));
  // Outer layers above the step are outside the domain.
  CHECK_THROWS_AS(probe_cell(g, 0.9, 1.9), ConfigError);
}

TEST_CASE("equilibrium run stops at the requested time") {
  SmallCell cell;
  SolverConfig scfg;
  NullSource none;
  ExecPlan plan;
  LinePool pool(plan);
  AdiStepper stepper(cell.grid, cell.layers, none, cell.timing, scfg, pool);

  RunnerConfig rcfg;
  rcfg.t_end = 10 * cell.timing.t_per;
  rcfg.probes = {{0.999, 0.0}, {0.0, 0.0}};

  EvolutionResult res = evolve(stepper, cell.timing, make_field(cell.grid, scfg.T0),
                               rcfg.t_end, rcfg);
  CHECK(res.reason == StopReason::ReachedTime);
  CHECK(res.t >= rcfg.t_end);
  CHECK(res.steps == static_cast<long>(res.trace.size()));

  // Accepted-time bookkeeping reproduces the final time exactly.
  Real t = 0, comp = 0;
  Real prev_t = 0;
  bool monotone = true;
  for (const auto& e : res.trace) {
    const Real y = e.tau - comp;
    const Real tt = t + y;
    comp = (tt - t) - y;
    t = tt;
    monotone = monotone && e.t > prev_t;
    prev_t = e.t;
  }
  CHECK(t == res.t);
  CHECK(monotone);

  // Probes stay at the bath temperature (about 30k accepted steps here).
  Real worst = 0;
  for (const auto& e : res.trace)
    for (Real v : e.values) worst = std::max(worst, std::abs(v - scfg.T0));
  CHECK(worst <= 1e-11);
}

TEST_CASE("powered run records phase snapshots and fires the detector") {
  SmallCell cell;
  cell.timing.I0 = 1.0;
  SolverConfig scfg;
  JouleSource source(cell.timing, 1, *cell.layers[1], scfg.range_policy);
  ExecPlan plan;
  LinePool pool(plan);
  AdiStepper stepper(cell.grid, cell.layers, source, cell.timing, scfg, pool);

  RunnerConfig rcfg;
  rcfg.t_end = 40 * cell.timing.t_per;
  rcfg.probes = {{0.999, 0.0}};
  rcfg.detector.samples_per_period = 32;
  rcfg.detector.tolerance = 5e-3;
  rcfg.detector.min_periods = 2;
  rcfg.snapshot_times = {0.5 * cell.timing.t_per};

  EvolutionResult res = evolve(stepper, cell.timing, make_field(cell.grid, scfg.T0),
                               rcfg.t_end, rcfg);

  REQUIRE(res.pre_on.has_value());
  REQUIRE(res.post_off.has_value());
  // Latest pre-turn-on capture sits just below a period boundary.
  const Real phase = std::fmod(res.pre_on->t, cell.timing.t_per);
  CHECK(phase > 0.5 * cell.timing.t_per);
  // Post-turn-off capture lands just after the pulse shut down.
  const Real off_phase = std::fmod(res.post_off->t, cell.timing.t_per);
  CHECK(off_phase >= cell.timing.t_src);
  CHECK(off_phase < 0.5 * cell.timing.t_per);
  REQUIRE(res.at_times.size() == 1);
  CHECK(res.at_times[0].t >= 0.5 * cell.timing.t_per);

  // The mild source settles into a periodic state well before t_end.
  CHECK(res.reason == StopReason::PeriodicRegime);
  CHECK(res.fire_t > cell.timing.t_per);
  CHECK_FALSE(res.detector_periods.empty());
}

TEST_CASE("tau floor surfaces as a stop reason with state") {
  SmallCell cell;
  cell.timing.I0 = 1.0;
  SolverConfig scfg;
  scfg.max_iter = 1;
  scfg.tau_min = 0.9 * cell.timing.t_src / 100.0;
  JouleSource source(cell.timing, 1, *cell.layers[1], scfg.range_policy);
  ExecPlan plan;
  LinePool pool(plan);
  AdiStepper stepper(cell.grid, cell.layers, source, cell.timing, scfg, pool);

  RunnerConfig rcfg;
  rcfg.t_end = cell.timing.t_per;
  rcfg.probes = {{0.999, 0.0}};

  EvolutionResult res = evolve(stepper, cell.timing, make_field(cell.grid, scfg.T0),
                               rcfg.t_end, rcfg);
  CHECK(res.reason == StopReason::TauFloor);
  CHECK_FALSE(res.error.empty());
  // The surfaced state is the last accepted field: finite everywhere.
  for (Index i = 0; i < cell.grid.nr(); ++i)
    for (Index j = 0; j < cell.grid.col_extent(i); ++j)
      CHECK(std::isfinite(res.field(i, j)));
}
