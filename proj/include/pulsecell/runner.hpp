#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "pulsecell/solver.hpp"
#include "pulsecell/types.hpp"

namespace pulsecell {

struct RegimeDetectorConfig {
  int samples_per_period = 64;
  Real tolerance = 1e-3;  // temperature units
  int min_periods = 2;    // consecutive period pairs that must agree

  void validate() const {
    if (samples_per_period < 1)
      throw ConfigError("detector.samples_per_period: must be >= 1");
    if (!(tolerance > 0)) throw ConfigError("detector.tolerance: must be > 0");
    if (min_periods < 1) throw ConfigError("detector.min_periods: must be >= 1");
  }
};

struct ProbeSpec {
  Real r = 0, z = 0;
};

struct TraceEntry {
  Real t = 0;
  Real tau = 0;
  std::vector<Real> values;  // one per probe
};

enum class StopReason { ReachedTime, PeriodicRegime, TauFloor };

/// Nearest cell center holding a probe location; throws if that cell is
/// outside the stepped domain.
std::pair<Index, Index> probe_cell(const Grid& grid, Real r, Real z);
Real probe_value(const Grid& grid, const Array2& field, Real r, Real z);

/// Resamples an adaptively-stepped trace onto fixed phases within each pulse
/// period by linear interpolation. Completed periods become rows.
class PhaseResampler {
 public:
  PhaseResampler(Real t_per, int samples_per_period);

  void seed(Real t, Real v);
  void feed(Real t, Real v);

  const std::vector<Vector>& periods() const { return rows_; }
  int samples_per_period() const { return samples_; }

 private:
  Real t_per_;
  int samples_;
  Real dt_;
  long next_sample_ = 0;
  bool seeded_ = false;
  Real t_prev_ = 0, v_prev_ = 0;
  Vector current_;
  std::vector<Vector> rows_;
};

/// True when the last min_periods consecutive period pairs agree phase-wise
/// within tolerance. Requires at least min_periods+1 completed periods.
bool detect_periodic(const std::vector<Vector>& period_rows,
                     const RegimeDetectorConfig& cfg);

/// Incremental wrapper: feed per-step samples, fires at a period completion.
class RegimeDetector {
 public:
  RegimeDetector(Real t_per, RegimeDetectorConfig cfg);

  void seed(Real t, Real v) { resampler_.seed(t, v); }
  /// Returns true the first time the periodic criterion is met.
  bool update(Real t, Real v);
  bool fired() const { return fired_; }
  const PhaseResampler& resampler() const { return resampler_; }

 private:
  RegimeDetectorConfig cfg_;
  PhaseResampler resampler_;
  size_t checked_rows_ = 1;  // pairs need two rows
  int consecutive_ = 0;
  bool fired_ = false;
};

struct RunnerConfig {
  Real t_end = 1.0;
  RegimeDetectorConfig detector;
  std::vector<ProbeSpec> probes;
  std::vector<Real> snapshot_times;
  bool snapshot_pre_on = true;    // capture field just before a pulse turn-on
  bool snapshot_post_off = true;  // capture field just after a pulse turn-off

  void validate() const {
    if (!(t_end > 0)) throw ConfigError("runner.t_end: must be > 0");
    detector.validate();
    for (Real ts : snapshot_times)
      if (ts < 0) throw ConfigError("runner.snapshot_times: must be >= 0");
  }
};

struct Snapshot {
  Real t = 0;
  Array2 field;
};

struct EvolutionResult {
  Array2 field;
  Real t = 0;
  long steps = 0;
  StopReason reason = StopReason::ReachedTime;
  std::vector<TraceEntry> trace;
  std::optional<Snapshot> pre_on;    // latest pre-turn-on capture
  std::optional<Snapshot> post_off;  // latest post-turn-off capture
  std::vector<Snapshot> at_times;
  std::vector<Vector> detector_periods;  // resampled rows of probe 0
  Real fire_t = -1;                      // time the detector fired, if it did
  std::string error;                     // diagnostic for TauFloor stops
};

/// Runs the stepper from t=0 until t_end, the periodic-regime detector fires,
/// or the adaptive step hits its floor. Regime detection engages only for
/// powered runs (I0 > 0) with at least one probe; probe 0 drives it.
EvolutionResult evolve(AdiStepper& stepper, const SourceSpec& timing, Array2 initial,
                       Real t_end, const RunnerConfig& cfg);

}  // namespace pulsecell
