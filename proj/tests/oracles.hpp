// Test-only reference implementations, independent of the line-solver path.
#pragma once

#include <Eigen/Dense>
#include <random>

#include "pulsecell/geometry.hpp"
#include "pulsecell/materials.hpp"
#include "pulsecell/solver.hpp"
#include "pulsecell/source.hpp"
#include "pulsecell/tridiagonal.hpp"

namespace pulsecell::testing {

inline Vector dense_solve(const TridiagonalSystem& sys) {
  const Index n = sys.size();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Index k = 0; k < n; ++k) {
    a(k, k) = sys.diag[k];
    if (k > 0) a(k, k - 1) = sys.lower[k];
    if (k < n - 1) a(k, k + 1) = sys.upper[k];
  }
  return a.partialPivLu().solve(sys.rhs);
}

inline TridiagonalSystem random_dominant_system(std::mt19937_64& rng, Index n) {
  std::uniform_real_distribution<Real> coef(0.05, 1.0);
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
    sys.diag[k] = lo + up + coef(rng);  // strictly dominant
    sys.rhs[k] = 2.0 * coef(rng) - 1.0;
  }
  return sys;
}

/// Global cell index map over the masked cells of a grid.
struct CellIndexMap {
  explicit CellIndexMap(const Grid& grid) : idx(grid.nr(), grid.nz()) {
    idx.setConstant(-1);
    Index next = 0;
    for (Index j = 0; j < grid.nz(); ++j)
      for (Index i = 0; i < grid.row_extent(j); ++i) idx(i, j) = next++;
    count = next;
  }
  Eigen::Array<Index, Eigen::Dynamic, Eigen::Dynamic> idx;
  Index count = 0;
};

/// Dense fixed-point reference for one implicit-in-r half-step: assembles the
/// full linear system over all masked cells with coefficients frozen at the
/// iterate and re-solves until the iterate settles. Independent of the
/// per-line assembly and Thomas path.
inline Array2 dense_radial_half_step(const Grid& grid, const LayerMaterials& mats,
                                     const SourceModel& source_at_half_time,
                                     const SolverConfig& cfg, const Array2& T_cur,
                                     Real tau, Real stop_tol, int max_sweeps = 200) {
  const CellIndexMap map(grid);
  Array2 iter = T_cur;
  auto lam_face = [&](const MaterialTable& own, const MaterialTable& other, Real a,
                      Real b) {
    return face_lambda(own, other, a, b, cfg.halfpoint_rule, cfg.range_policy);
  };
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(map.count, map.count);
    Vector rhs = Vector::Zero(map.count);
    for (Index j = 0; j < grid.nz(); ++j) {
      const Index n = grid.row_extent(j);
      for (Index i = 0; i < n; ++i) {
        const Index row = map.idx(i, j);
        const MaterialTable& mat = *mats[grid.layer(i)];
        const Real vol = grid.r_center(i) * grid.control_r(i);
        const Real K = mat.rho() *
                       mat.eval(Property::HeatCapacity, iter(i, j), cfg.range_policy) /
                       (0.5 * tau);
        A(row, row) += K;
        rhs[row] += K * T_cur(i, j);
        if (i > 0) {
          const Real c = grid.face_r_lo(i) *
                         lam_face(*mats[grid.layer(i - 1)], *mats[grid.layer(i)],
                                  iter(i - 1, j), iter(i, j)) /
                         (grid.gap_r(i) * vol);
          A(row, row) += c;
          A(row, map.idx(i - 1, j)) -= c;
        }
        if (i < n - 1) {
          const Real c = grid.face_r_lo(i + 1) *
                         lam_face(*mats[grid.layer(i)], *mats[grid.layer(i + 1)],
                                  iter(i, j), iter(i + 1, j)) /
                         (grid.gap_r(i + 1) * vol);
          A(row, row) += c;
          A(row, map.idx(i + 1, j)) -= c;
        }
        rhs[row] += apply_lambda_z(grid, mats, T_cur, i, j, cfg);
        rhs[row] += source_at_half_time.power(i, j, grid.layer(i), iter(i, j));
      }
    }
    Vector sol = A.partialPivLu().solve(rhs);
    Real delta = 0;
    Array2 next = iter;
    for (Index j = 0; j < grid.nz(); ++j)
      for (Index i = 0; i < grid.row_extent(j); ++i) {
        next(i, j) = sol[map.idx(i, j)];
        delta = std::max(delta, std::abs(next(i, j) - iter(i, j)));
      }
    iter.swap(next);
    if (delta < stop_tol) break;
  }
  return iter;
}

/// Mirror of dense_radial_half_step for the implicit-in-z half-step: capacity
/// and source frozen at T_half, conductivities at the running iterate.
inline Array2 dense_axial_half_step(const Grid& grid, const LayerMaterials& mats,
                                    const SourceModel& source_at_half_time,
                                    const SolverConfig& cfg, const Array2& T_half,
                                    Real tau, Real stop_tol, int max_sweeps = 200) {
  const CellIndexMap map(grid);
  Array2 iter = T_half;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(map.count, map.count);
    Vector rhs = Vector::Zero(map.count);
    for (Index i = 0; i < grid.nr(); ++i) {
      const Index m = grid.col_extent(i);
      const MaterialTable& mat = *mats[grid.layer(i)];
      for (Index j = 0; j < m; ++j) {
        const Index row = map.idx(i, j);
        const Real eta = grid.control_z(j);
        const Real K = mat.rho() *
                       mat.eval(Property::HeatCapacity, T_half(i, j), cfg.range_policy) /
                       (0.5 * tau);
        A(row, row) += K;
        rhs[row] += K * T_half(i, j);
        if (j > 0) {
          const Real c = face_lambda(mat, mat, iter(i, j - 1), iter(i, j),
                                     cfg.halfpoint_rule, cfg.range_policy) /
                         (grid.gap_z(j) * eta);
          A(row, row) += c;
          A(row, map.idx(i, j - 1)) -= c;
        }
        if (j < m - 1) {
          const Real c = face_lambda(mat, mat, iter(i, j), iter(i, j + 1),
                                     cfg.halfpoint_rule, cfg.range_policy) /
                         (grid.gap_z(j + 1) * eta);
          A(row, row) += c;
          A(row, map.idx(i, j + 1)) -= c;
        } else if (grid.layer(i) == 0 && !cfg.all_neumann) {
          const Real c = mat.eval(Property::Conductivity, cfg.T0, cfg.range_policy) /
                         (0.5 * grid.width_z(j) * eta);
          A(row, row) += c;
          rhs[row] += c * cfg.T0;
        }
        rhs[row] += apply_lambda_r(grid, mats, T_half, i, j, cfg);
        rhs[row] += source_at_half_time.power(i, j, grid.layer(i), T_half(i, j));
      }
    }
    Vector sol = A.partialPivLu().solve(rhs);
    Real delta = 0;
    Array2 next = iter;
    for (Index j = 0; j < grid.nz(); ++j)
      for (Index i = 0; i < grid.row_extent(j); ++i) {
        next(i, j) = sol[map.idx(i, j)];
        delta = std::max(delta, std::abs(next(i, j) - iter(i, j)));
      }
    iter.swap(next);
    if (delta < stop_tol) break;
  }
  return iter;
}

/// Nonlinear explicit-Euler reference stepper with a tiny step.
inline void explicit_euler_steps(const Grid& grid, const LayerMaterials& mats,
                                 SourceModel& source, const SolverConfig& cfg,
                                 Array2& field, Real t_begin, Real t_end, Real dt) {
  Array2 rate(grid.nr(), grid.nz());
  Real t = t_begin;
  while (t < t_end - 0.5 * dt) {
    source.bind_time(t);
    for (Index j = 0; j < grid.nz(); ++j)
      for (Index i = 0; i < grid.row_extent(j); ++i) {
        const MaterialTable& mat = *mats[grid.layer(i)];
        const Real rc = mat.rho() *
                        mat.eval(Property::HeatCapacity, field(i, j), cfg.range_policy);
        rate(i, j) = (apply_lambda_r(grid, mats, field, i, j, cfg) +
                      apply_lambda_z(grid, mats, field, i, j, cfg) +
                      source.power(i, j, grid.layer(i), field(i, j))) /
                     rc;
      }
    for (Index j = 0; j < grid.nz(); ++j)
      for (Index i = 0; i < grid.row_extent(j); ++i) field(i, j) += dt * rate(i, j);
    t += dt;
  }
}

}  // namespace pulsecell::testing
