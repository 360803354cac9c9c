#include "pulsecell/solver.hpp"

#include <cassert>
#include <cmath>
#include <vector>

namespace pulsecell {

namespace {

struct LineScratch {
  std::vector<Real> a, b, c, d, x, w, fcoef, t, k0, r0;
  void reserve(size_t n) {
    if (a.size() < n) {
      a.resize(n);
      b.resize(n);
      c.resize(n);
      d.resize(n);
      x.resize(n);
      w.resize(n);
      fcoef.resize(n + 1);
      t.resize(n);
      k0.resize(n);
      r0.resize(n);
    }
  }
};

thread_local LineScratch tls_scratch;

}  // namespace

void SolverConfig::validate() const {
  if (!(epsilon > 0)) throw ConfigError("solver.epsilon: must be > 0");
  if (max_iter < 1) throw ConfigError("solver.max_iter: must be >= 1");
  if (!(tau_transient_divisor > 0))
    throw ConfigError("solver.tau_transient_divisor: must be > 0");
  if (!(tau_source_divisor > 0))
    throw ConfigError("solver.tau_source_divisor: must be > 0");
  if (!(T0 > 0)) throw ConfigError("solver.T0: must be > 0");
  if (!(t_ceiling > T0)) throw ConfigError("solver.t_ceiling: must exceed T0");
}

Real initial_tau(Real t, const SourceSpec& source, const SolverConfig& cfg) {
  const Real phase = std::fmod(t, source.t_per);
  const bool in_transient =
      phase <= source.t_trs ||
      (phase >= source.t_src && phase <= source.t_src + source.t_trs);
  return in_transient ? source.t_trs / cfg.tau_transient_divisor
                      : source.t_src / cfg.tau_source_divisor;
}

Real apply_lambda_r(const Grid& grid, const LayerMaterials& mats, const Array2& field,
                    Index i, Index j, const SolverConfig& cfg) {
  assert(grid.in_mask(i, j));
  const Index n = grid.row_extent(j);
  Real flux_lo = 0, flux_hi = 0;
  if (i > 0) {
    const Real coef = grid.face_r_lo(i) *
                      face_lambda(*mats[grid.layer(i - 1)], *mats[grid.layer(i)],
                                  field(i - 1, j), field(i, j), cfg.halfpoint_rule,
                                  cfg.range_policy) /
                      grid.gap_r(i);
    flux_lo = coef * (field(i, j) - field(i - 1, j));
  }
  if (i < n - 1) {
    const Real coef = grid.face_r_lo(i + 1) *
                      face_lambda(*mats[grid.layer(i)], *mats[grid.layer(i + 1)],
                                  field(i, j), field(i + 1, j), cfg.halfpoint_rule,
                                  cfg.range_policy) /
                      grid.gap_r(i + 1);
    flux_hi = coef * (field(i + 1, j) - field(i, j));
  }
  return (flux_hi - flux_lo) / (grid.r_center(i) * grid.control_r(i));
}

Real apply_lambda_z(const Grid& grid, const LayerMaterials& mats, const Array2& field,
                    Index i, Index j, const SolverConfig& cfg) {
  assert(grid.in_mask(i, j));
  const Index m = grid.col_extent(i);
  const MaterialTable& mat = *mats[grid.layer(i)];
  Real flux_lo = 0, flux_hi = 0;
  if (j > 0) {
    const Real coef = face_lambda(mat, mat, field(i, j - 1), field(i, j),
                                  cfg.halfpoint_rule, cfg.range_policy) /
                      grid.gap_z(j);
    flux_lo = coef * (field(i, j) - field(i, j - 1));
  }
  if (j < m - 1) {
    const Real coef = face_lambda(mat, mat, field(i, j), field(i, j + 1),
                                  cfg.halfpoint_rule, cfg.range_policy) /
                      grid.gap_z(j + 1);
    flux_hi = coef * (field(i, j + 1) - field(i, j));
  } else if (grid.layer(i) == 0 && !cfg.all_neumann) {
    // Ghost elimination: the terminal face sits half a cell beyond the last
    // center and the face-mean temperature is exactly T0.
    const Real lam = mat.eval(Property::Conductivity, cfg.T0, cfg.range_policy);
    flux_hi = lam * (cfg.T0 - field(i, j)) / (0.5 * grid.width_z(j));
  }
  return (flux_hi - flux_lo) / grid.control_z(j);
}

Real weighted_heat_sum(const Grid& grid, const LayerMaterials& mats, const Array2& field) {
  Real sum = 0, comp = 0;
  for (Index i = 0; i < grid.nr(); ++i) {
    const Index m = grid.col_extent(i);
    const MaterialTable& mat = *mats[grid.layer(i)];
    for (Index j = 0; j < m; ++j) {
      const Real cv = mat.eval(Property::HeatCapacity, field(i, j));
      const Real term = grid.r_center(i) * grid.control_r(i) *
                        grid.control_z(j) * mat.rho() * cv * field(i, j);
      const Real y = term - comp;
      const Real t = sum + y;
      comp = (t - sum) - y;
      sum = t;
    }
  }
  return sum;
}

Array2 make_field(const Grid& grid, Real value) {
  return Array2::Constant(grid.nr(), grid.nz(), value);
}

AdiStepper::AdiStepper(const Grid& grid, LayerMaterials mats, SourceModel& source,
                       const SourceSpec& timing, SolverConfig cfg, LinePool& pool)
    : grid_(grid),
      mats_(std::move(mats)),
      source_(source),
      timing_(timing),
      cfg_(cfg),
      pool_(pool) {
  cfg_.validate();
  timing_.validate();
  if (static_cast<int>(mats_.size()) != grid_.domain().layer_count())
    throw ConfigError("stepper: one material required per layer");
  for (const auto* m : mats_)
    if (m == nullptr) throw ConfigError("stepper: null material");
  tau_floor_ = cfg_.effective_tau_min(timing_.t_per);
  half_ = make_field(grid_, cfg_.T0);
  next_ = make_field(grid_, cfg_.T0);
  iter_buf_ = make_field(grid_, cfg_.T0);
  expl_ = Array2::Zero(grid_.nr(), grid_.nz());
  kbar_ = Array2::Zero(grid_.nr(), grid_.nz());
  line_delta_ = Vector::Zero(std::max(grid_.nr(), grid_.nz()));
  inv_vol_r_ = Vector(grid_.nr());
  inv_gap_r_ = Vector(grid_.nr() + 1);
  for (Index i = 0; i < grid_.nr(); ++i) {
    inv_vol_r_[i] = 1.0 / (grid_.r_center(i) * grid_.control_r(i));
    inv_gap_r_[i] = 1.0 / grid_.gap_r(i);
  }
  inv_gap_r_[grid_.nr()] = 1.0 / grid_.gap_r(grid_.nr());
  inv_eta_ = Vector(grid_.nz());
  inv_gap_z_ = Vector(grid_.nz() + 1);
  for (Index j = 0; j < grid_.nz(); ++j) {
    inv_eta_[j] = 1.0 / grid_.control_z(j);
    inv_gap_z_[j] = 1.0 / grid_.gap_z(j);
  }
  inv_gap_z_[grid_.nz()] = 1.0 / grid_.gap_z(grid_.nz());
}

void AdiStepper::explicit_axial_pass(const Array2& src, Array2& out) {
  pool_.for_lines(grid_.nr(), [&](Index i) {
    const Index m = grid_.col_extent(i);
    auto& s = tls_scratch;
    s.reserve(static_cast<size_t>(m));
    const MaterialTable& mat = *mats_[grid_.layer(i)];
    const bool dirichlet_top = grid_.layer(i) == 0 && !cfg_.all_neumann;
    for (Index j = 0; j < m; ++j) s.t[j] = src(i, j);
    Real flux_lo = 0;
    for (Index j = 0; j < m; ++j) {
      Real flux_hi;
      if (j < m - 1) {
        const Real coef = face_lambda(mat, mat, s.t[j], s.t[j + 1],
                                      cfg_.halfpoint_rule, cfg_.range_policy) /
                          grid_.gap_z(j + 1);
        flux_hi = coef * (s.t[j + 1] - s.t[j]);
      } else if (dirichlet_top) {
        const Real lam = mat.eval(Property::Conductivity, cfg_.T0, cfg_.range_policy);
        flux_hi = lam * (cfg_.T0 - s.t[j]) / (0.5 * grid_.width_z(j));
      } else {
        flux_hi = 0;
      }
      s.x[j] = (flux_hi - flux_lo) / grid_.control_z(j);
      flux_lo = flux_hi;
    }
    for (Index j = 0; j < m; ++j) out(i, j) = s.x[j];
  });
}

void AdiStepper::radial_line(Index j, const Array2& T_iter, const Array2& T_cur,
                             Real half_k_factor, Array2& out) {
  const Index n = grid_.row_extent(j);
  auto& s = tls_scratch;
  s.reserve(static_cast<size_t>(n));
  const Real* Ts = &T_iter(0, j);
  const Real* Tc = &T_cur(0, j);
  // Face coefficients at the iterate and the resulting fluxes of the anchor
  // field. Solving for the increment around T_cur keeps an equilibrium field
  // an exact fixed point: its right-hand side vanishes identically.
  for (Index f = 1; f < n; ++f) {
    s.fcoef[f] = grid_.face_r_lo(f) *
                 face_lambda(*mats_[grid_.layer(f - 1)], *mats_[grid_.layer(f)],
                             Ts[f - 1], Ts[f], cfg_.halfpoint_rule, cfg_.range_policy) *
                 inv_gap_r_[f];
    s.r0[f] = s.fcoef[f] * (Tc[f] - Tc[f - 1]);
  }
  for (Index i = 0; i < n; ++i) {
    const MaterialTable& mat = *mats_[grid_.layer(i)];
    const Real inv_vol = inv_vol_r_[i];
    const Real A = i > 0 ? s.fcoef[i] * inv_vol : 0.0;
    const Real C = i < n - 1 ? s.fcoef[i + 1] * inv_vol : 0.0;
    const Real K =
        mat.rho() * mat.eval(Property::HeatCapacity, Ts[i], cfg_.range_policy) *
        half_k_factor;
    const Real flux_lo = i > 0 ? s.r0[i] : 0.0;
    const Real flux_hi = i < n - 1 ? s.r0[i + 1] : 0.0;
    s.a[i] = -A;
    s.b[i] = K + A + C;
    s.c[i] = -C;
    s.d[i] = (flux_hi - flux_lo) * inv_vol + expl_(i, j) +
             source_.power(i, j, grid_.layer(i), Ts[i]);
  }
  thomas_solve_inplace(s.a.data(), s.b.data(), s.c.data(), s.d.data(), s.x.data(),
                       s.w.data(), n);
  Real* o = &out(0, j);
  Real dmax = 0;
  for (Index i = 0; i < n; ++i) {
    o[i] = Tc[i] + s.x[i];
    dmax = std::max(dmax, std::abs(o[i] - Ts[i]));
  }
  line_delta_[j] = dmax;
}

HalfStepOutcome AdiStepper::radial_half_step(const Array2& T_cur, Real t, Real tau,
                                             Array2& out) {
  assert(&out != &T_cur);
  source_.bind_time(t + 0.5 * tau);
  explicit_axial_pass(T_cur, expl_);
  const Real half_k = 2.0 / tau;
  const Array2* src = &T_cur;
  HalfStepOutcome res;
  for (int s = 1; s <= cfg_.max_iter; ++s) {
    Array2* dst = (src == &out) ? &iter_buf_ : &out;
    pool_.for_lines(grid_.nz(),
                    [&](Index j) { radial_line(j, *src, T_cur, half_k, *dst); });
    res.iterations = s;
    res.last_delta = line_delta_.head(grid_.nz()).maxCoeff();
    if (res.last_delta < cfg_.epsilon) {
      if (dst != &out) out = *dst;
      res.converged = true;
      return res;
    }
    src = dst;
  }
  return res;
}

void AdiStepper::axial_fixed_rhs_pass(const Array2& T_half, Real half_k_factor) {
  pool_.for_lines(grid_.nz(), [&](Index j) {
    const Index n = grid_.row_extent(j);
    auto& s = tls_scratch;
    s.reserve(static_cast<size_t>(n));
    const Real* Th = &T_half(0, j);
    for (Index f = 1; f < n; ++f) {
      s.fcoef[f] = grid_.face_r_lo(f) *
                   face_lambda(*mats_[grid_.layer(f - 1)], *mats_[grid_.layer(f)],
                               Th[f - 1], Th[f], cfg_.halfpoint_rule,
                               cfg_.range_policy) *
                   inv_gap_r_[f];
    }
    Real flux_lo = 0;
    for (Index i = 0; i < n; ++i) {
      const MaterialTable& mat = *mats_[grid_.layer(i)];
      const Real flux_hi = i < n - 1 ? s.fcoef[i + 1] * (Th[i + 1] - Th[i]) : 0.0;
      const Real lam_r = (flux_hi - flux_lo) * inv_vol_r_[i];
      kbar_(i, j) = mat.rho() *
                    mat.eval(Property::HeatCapacity, Th[i], cfg_.range_policy) *
                    half_k_factor;
      expl_(i, j) = lam_r + source_.power(i, j, grid_.layer(i), Th[i]);
      flux_lo = flux_hi;
    }
  });
}

void AdiStepper::axial_line(Index i, const Array2& T_iter, const Array2& T_half,
                            Array2& out) {
  const Index m = grid_.col_extent(i);
  auto& s = tls_scratch;
  s.reserve(static_cast<size_t>(m));
  const MaterialTable& mat = *mats_[grid_.layer(i)];
  const bool dirichlet_top = grid_.layer(i) == 0 && !cfg_.all_neumann;
  // Gather the strided columns once; all remaining work is contiguous.
  for (Index j = 0; j < m; ++j) {
    s.t[j] = T_iter(i, j);
    s.r0[j] = T_half(i, j);
    s.k0[j] = kbar_(i, j);
    s.d[j] = expl_(i, j);
  }
  for (Index f = 1; f < m; ++f) {
    s.fcoef[f] = face_lambda(mat, mat, s.t[f - 1], s.t[f], cfg_.halfpoint_rule,
                             cfg_.range_policy) *
                 inv_gap_z_[f];
  }
  // Increment form around the half-layer anchor.
  for (Index j = 0; j < m; ++j) {
    const Real inv_eta = inv_eta_[j];
    const Real A = j > 0 ? s.fcoef[j] * inv_eta : 0.0;
    const Real C = j < m - 1 ? s.fcoef[j + 1] * inv_eta : 0.0;
    const Real flux_lo = j > 0 ? s.fcoef[j] * (s.r0[j] - s.r0[j - 1]) : 0.0;
    Real flux_hi = j < m - 1 ? s.fcoef[j + 1] * (s.r0[j + 1] - s.r0[j]) : 0.0;
    s.a[j] = -A;
    s.b[j] = s.k0[j] + A + C;
    s.c[j] = -C;
    if (j == m - 1 && dirichlet_top) {
      const Real face = mat.eval(Property::Conductivity, cfg_.T0, cfg_.range_policy) /
                        (0.5 * grid_.width_z(j));
      s.b[j] += face * inv_eta;
      flux_hi += face * (cfg_.T0 - s.r0[j]);
    }
    s.d[j] += (flux_hi - flux_lo) * inv_eta;
  }
  thomas_solve_inplace(s.a.data(), s.b.data(), s.c.data(), s.d.data(), s.x.data(),
                       s.w.data(), m);
  Real dmax = 0;
  for (Index j = 0; j < m; ++j) {
    const Real v = s.r0[j] + s.x[j];
    dmax = std::max(dmax, std::abs(v - s.t[j]));
    out(i, j) = v;
  }
  line_delta_[i] = dmax;
}

HalfStepOutcome AdiStepper::axial_half_step(const Array2& T_half, Real t, Real tau,
                                            Array2& out) {
  assert(&out != &T_half);
  source_.bind_time(t + 0.5 * tau);
  axial_fixed_rhs_pass(T_half, 2.0 / tau);
  const Array2* src = &T_half;
  HalfStepOutcome res;
  for (int s = 1; s <= cfg_.max_iter; ++s) {
    Array2* dst = (src == &out) ? &iter_buf_ : &out;
    pool_.for_lines(grid_.nr(), [&](Index i) { axial_line(i, *src, T_half, *dst); });
    res.iterations = s;
    res.last_delta = line_delta_.head(grid_.nr()).maxCoeff();
    if (res.last_delta < cfg_.epsilon) {
      if (dst != &out) out = *dst;
      res.converged = true;
      return res;
    }
    src = dst;
  }
  return res;
}

StepResult AdiStepper::step(Array2& field, Real t) {
  Real tau = initial_tau(t, timing_, cfg_);
  StepResult res;
  for (;;) {
    res.radial = radial_half_step(field, t, tau, half_);
    if (res.radial.converged) {
      res.axial = axial_half_step(half_, t, tau, next_);
      if (res.axial.converged) {
        field.swap(next_);
        res.tau_used = tau;
        return res;
      }
    }
    tau *= 0.5;
    ++res.halvings;
    if (tau < tau_floor_) throw TauFloorError(tau, tau_floor_, t);
  }
}

}  // namespace pulsecell
