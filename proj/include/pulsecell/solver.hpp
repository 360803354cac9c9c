#pragma once

#include "pulsecell/geometry.hpp"
#include "pulsecell/materials.hpp"
#include "pulsecell/parallel.hpp"
#include "pulsecell/source.hpp"
#include "pulsecell/tridiagonal.hpp"
#include "pulsecell/types.hpp"

namespace pulsecell {

struct SolverConfig {
  Real epsilon = 1e-6;   // iteration stop: max-norm of successive iterates
  int max_iter = 10;     // iteration budget before the time step is halved
  Real tau_min = -1;     // halving floor; <0 means 1e-12 * t_per
  Real tau_transient_divisor = 1000;
  Real tau_source_divisor = 100;
  HalfPointRule halfpoint_rule = HalfPointRule::MeanTemperature;
  RangePolicy range_policy = RangePolicy::Clamp;
  bool all_neumann = false;  // test mode: disable the terminal Dirichlet face
  Real T0 = 4.2;             // initial and terminal temperature
  Real t_ceiling = 300;      // required upper coverage of property tables

  void validate() const;
  Real effective_tau_min(Real t_per) const {
    return tau_min > 0 ? tau_min : 1e-12 * t_per;
  }
};

/// Fresh time-step estimate for an evolution step starting at t: a fine step
/// inside the turn-on/turn-off transient windows, a coarse one elsewhere.
Real initial_tau(Real t, const SourceSpec& source, const SolverConfig& cfg);

/// Discrete radial diffusion operator at one masked cell: flux difference over
/// the cell's control volume, with the axis face carrying zero flux and the
/// outer face closed as zero-flux.
Real apply_lambda_r(const Grid& grid, const LayerMaterials& mats, const Array2& field,
                    Index i, Index j, const SolverConfig& cfg);

/// Discrete axial diffusion operator; zero-flux at z=0 and at the outer
/// layers' end face, half-cell Dirichlet closure at the core's terminal face.
Real apply_lambda_z(const Grid& grid, const LayerMaterials& mats, const Array2& field,
                    Index i, Index j, const SolverConfig& cfg);

/// Control-volume-weighted heat content sum over masked cells.
Real weighted_heat_sum(const Grid& grid, const LayerMaterials& mats, const Array2& field);

Array2 make_field(const Grid& grid, Real value);

struct HalfStepOutcome {
  bool converged = false;
  int iterations = 0;
  Real last_delta = 0;
};

struct StepResult {
  Real tau_used = 0;
  int halvings = 0;
  HalfStepOutcome radial, axial;
};

/// Alternating-direction implicit stepper with coefficient-freezing simple
/// iteration per half-step and adaptive halving of the time step on
/// non-convergence. Line systems are solved independently per grid line
/// through the pool; output is bitwise independent of the worker count.
class AdiStepper {
 public:
  AdiStepper(const Grid& grid, LayerMaterials mats, SourceModel& source,
             const SourceSpec& timing, SolverConfig cfg, LinePool& pool);

  /// Implicit-in-r half-step: iterates line solves with coefficients frozen at
  /// the previous iterate until the max-norm criterion passes or the budget
  /// runs out. `out` receives the half-layer field on success.
  HalfStepOutcome radial_half_step(const Array2& T_cur, Real t, Real tau, Array2& out);

  /// Implicit-in-z mirror; capacity and source terms stay frozen at the
  /// half-layer field, only conductivities track the iterate.
  HalfStepOutcome axial_half_step(const Array2& T_half, Real t, Real tau, Array2& out);

  /// One accepted evolution step: estimates tau, runs both half-steps, halves
  /// tau and restarts on non-convergence. Throws TauFloorError at the floor.
  StepResult step(Array2& field, Real t);

  const SolverConfig& config() const { return cfg_; }
  const Grid& grid() const { return grid_; }

 private:
  void explicit_axial_pass(const Array2& src, Array2& out);
  void axial_fixed_rhs_pass(const Array2& T_half, Real half_k_factor);
  void radial_line(Index j, const Array2& T_iter, const Array2& T_cur, Real half_k_factor,
                   Array2& out);
  void axial_line(Index i, const Array2& T_iter, const Array2& T_half, Array2& out);

  const Grid& grid_;
  LayerMaterials mats_;
  SourceModel& source_;
  SourceSpec timing_;
  SolverConfig cfg_;
  LinePool& pool_;
  Real tau_floor_;

  Array2 half_, next_, iter_buf_, expl_, kbar_;
  Vector line_delta_;
  // Precomputed metric reciprocals for the sweep hot loops.
  Vector inv_vol_r_, inv_eta_, inv_gap_r_, inv_gap_z_;
};

}  // namespace pulsecell
