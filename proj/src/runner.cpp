#include "pulsecell/runner.hpp"

#include <algorithm>
#include <cmath>

namespace pulsecell {

namespace {

Index nearest_index(const std::vector<Real>& centers, Real x) {
  const auto it = std::lower_bound(centers.begin(), centers.end(), x);
  if (it == centers.begin()) return 0;
  if (it == centers.end()) return static_cast<Index>(centers.size()) - 1;
  const Index hi = static_cast<Index>(it - centers.begin());
  return (x - centers[hi - 1] <= centers[hi] - x) ? hi - 1 : hi;
}

}  // namespace

std::pair<Index, Index> probe_cell(const Grid& grid, Real r, Real z) {
  const Index i = nearest_index(grid.r_centers(), r);
  const Index j = nearest_index(grid.z_centers(), z);
  if (!grid.in_mask(i, j))
    throw ConfigError("probe location (" + std::to_string(r) + ", " + std::to_string(z) +
                      ") falls outside the domain");
  return {i, j};
}

Real probe_value(const Grid& grid, const Array2& field, Real r, Real z) {
  const auto [i, j] = probe_cell(grid, r, z);
  return field(i, j);
}

PhaseResampler::PhaseResampler(Real t_per, int samples_per_period)
    : t_per_(t_per), samples_(samples_per_period), dt_(t_per / samples_per_period) {
  if (!(t_per > 0)) throw ConfigError("resampler: period must be > 0");
  current_ = Vector::Zero(samples_);
}

void PhaseResampler::seed(Real t, Real v) {
  t_prev_ = t;
  v_prev_ = v;
  seeded_ = true;
  next_sample_ = static_cast<long>(std::ceil(t / dt_));
}

void PhaseResampler::feed(Real t, Real v) {
  if (!seeded_) {
    seed(t, v);
    return;
  }
  while (static_cast<Real>(next_sample_) * dt_ <= t) {
    const Real pt = static_cast<Real>(next_sample_) * dt_;
    Real val = v_prev_;
    if (t > t_prev_) val = v_prev_ + (v - v_prev_) * ((pt - t_prev_) / (t - t_prev_));
    current_[next_sample_ % samples_] = val;
    if (next_sample_ % samples_ == samples_ - 1) rows_.push_back(current_);
    ++next_sample_;
  }
  t_prev_ = t;
  v_prev_ = v;
}

bool detect_periodic(const std::vector<Vector>& period_rows,
                     const RegimeDetectorConfig& cfg) {
  cfg.validate();
  const size_t need = static_cast<size_t>(cfg.min_periods) + 1;
  if (period_rows.size() < need) return false;
  for (size_t k = period_rows.size() - cfg.min_periods; k < period_rows.size(); ++k) {
    const Real diff = (period_rows[k] - period_rows[k - 1]).cwiseAbs().maxCoeff();
    if (!(diff < cfg.tolerance)) return false;
  }
  return true;
}

RegimeDetector::RegimeDetector(Real t_per, RegimeDetectorConfig cfg)
    : cfg_(cfg), resampler_(t_per, cfg.samples_per_period) {
  cfg_.validate();
}

bool RegimeDetector::update(Real t, Real v) {
  resampler_.feed(t, v);
  const auto& rows = resampler_.periods();
  while (checked_rows_ < rows.size()) {
    const Real diff =
        (rows[checked_rows_] - rows[checked_rows_ - 1]).cwiseAbs().maxCoeff();
    consecutive_ = diff < cfg_.tolerance ? consecutive_ + 1 : 0;
    ++checked_rows_;
    if (!fired_ && consecutive_ >= cfg_.min_periods) {
      fired_ = true;
      return true;
    }
  }
  return false;
}

EvolutionResult evolve(AdiStepper& stepper, const SourceSpec& timing, Array2 initial,
                       Real t_end, const RunnerConfig& cfg) {
  cfg.validate();
  const Grid& grid = stepper.grid();

  std::vector<std::pair<Index, Index>> probe_cells;
  probe_cells.reserve(cfg.probes.size());
  for (const auto& p : cfg.probes) probe_cells.push_back(probe_cell(grid, p.r, p.z));

  EvolutionResult res;
  res.field = std::move(initial);

  const bool detect = timing.I0 > 0 && !probe_cells.empty();
  RegimeDetector detector(timing.t_per, cfg.detector);
  if (detect) {
    const auto [pi, pj] = probe_cells[0];
    detector.seed(0.0, res.field(pi, pj));
  }

  // Pulse-phase snapshot boundaries. "Pre turn-on" is the last state before a
  // period boundary; "post turn-off" the first state after the pulse has shut
  // down (turn-off edge plus the transient width).
  long period_idx = 1;
  long off_idx = 0;
  const Real off_offset = timing.t_src + timing.t_trs;

  std::vector<Real> pending_times = cfg.snapshot_times;
  std::sort(pending_times.begin(), pending_times.end());
  size_t next_time = 0;

  Real t = 0, comp = 0;
  Array2 prev = res.field;
  for (;;) {
    if (t >= t_end) {
      res.reason = StopReason::ReachedTime;
      break;
    }
    prev = res.field;
    const Real t_before = t;
    StepResult sr;
    try {
      sr = stepper.step(res.field, t);
    } catch (const TauFloorError& e) {
      res.field = prev;
      res.reason = StopReason::TauFloor;
      res.error = e.what();
      break;
    }
    // Compensated accumulation of the accepted steps.
    {
      const Real y = sr.tau_used - comp;
      const Real tt = t + y;
      comp = (tt - t) - y;
      t = tt;
    }
    ++res.steps;

    TraceEntry entry;
    entry.t = t;
    entry.tau = sr.tau_used;
    entry.values.reserve(probe_cells.size());
    for (const auto& [pi, pj] : probe_cells) entry.values.push_back(res.field(pi, pj));
    res.trace.push_back(std::move(entry));

    if (cfg.snapshot_pre_on &&
        t >= static_cast<Real>(period_idx) * timing.t_per &&
        t_before < static_cast<Real>(period_idx) * timing.t_per) {
      res.pre_on = Snapshot{t_before, prev};
    }
    while (t >= static_cast<Real>(period_idx) * timing.t_per) ++period_idx;
    if (cfg.snapshot_post_off &&
        t >= static_cast<Real>(off_idx) * timing.t_per + off_offset) {
      res.post_off = Snapshot{t, res.field};
      while (t >= static_cast<Real>(off_idx) * timing.t_per + off_offset) ++off_idx;
    }
    while (next_time < pending_times.size() && t >= pending_times[next_time]) {
      res.at_times.push_back(Snapshot{t, res.field});
      ++next_time;
    }

    if (detect) {
      const auto [pi, pj] = probe_cells[0];
      if (detector.update(t, res.field(pi, pj))) {
        res.fire_t = t;
        res.reason = StopReason::PeriodicRegime;
        break;
      }
    }
  }

  res.t = t;
  if (detect) res.detector_periods = detector.resampler().periods();
  return res;
}

}  // namespace pulsecell
