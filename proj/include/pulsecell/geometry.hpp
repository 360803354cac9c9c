#pragma once

#include <string>
#include <vector>

#include "pulsecell/errors.hpp"
#include "pulsecell/types.hpp"

namespace pulsecell {

/// Stepped multilayer cylinder: layer 0 (the core rod) spans r in [0, radii[0]]
/// and z in [0, core_length]; layers 1.. span the annuli up to radii.back()
/// but only z in [0, outer_length], with outer_length <= core_length.
struct DomainSpec {
  std::vector<Real> layer_radii;           // outer radius of each layer, increasing
  Real core_length = 0;                    // z_max
  Real outer_length = 0;                   // z_0
  std::vector<std::string> layer_materials;  // one name per layer
  int source_layer = 0;                    // index of the current-carrying layer

  void validate() const;
  int layer_count() const { return static_cast<int>(layer_radii.size()); }
  Real r_max() const { return layer_radii.back(); }
  Real layer_inner_radius(int m) const { return m == 0 ? 0.0 : layer_radii[m - 1]; }
  /// Annular cross-section of the source layer.
  Real source_cross_section() const;
};

struct GridSpec {
  std::vector<int> radial_divisions;  // cells per layer
  int axial_divisions_core = 1;       // cells over [0, core_length] in layer 0
  int axial_divisions_outer = 1;      // cells over [0, outer_length], shared by all layers

  void validate(const DomainSpec& domain) const;
};

struct CellMetrics {
  Real r;       // cell-center radius
  Real hbar;    // radial control width
  Real etabar;  // axial control width
  Real r_lo;    // flux-face radius below (0 at the axis)
  Real r_hi;    // flux-face radius above
};

/// Cell-centered shifted grid over the stepped domain. Uniform step inside each
/// layer zone; steps change only across layer interfaces, which fall on cell
/// faces, never on centers. Immutable after construction.
class Grid {
 public:
  Grid(DomainSpec domain, GridSpec spec);

  const DomainSpec& domain() const { return domain_; }
  const GridSpec& spec() const { return spec_; }

  Index nr() const { return static_cast<Index>(r_center_.size()); }
  Index nz() const { return static_cast<Index>(z_center_.size()); }
  Index nr_core() const { return nr_core_; }
  Index nz_shared() const { return nz_shared_; }

  Real r_center(Index i) const { return r_center_[i]; }
  Real z_center(Index j) const { return z_center_[j]; }
  Real width_r(Index i) const { return width_r_[i]; }
  Real width_z(Index j) const { return width_z_[j]; }

  /// Center gap r_i - r_{i-1}; index 0 and nr() return the mirror-ghost gap
  /// (the boundary cell's own width).
  Real gap_r(Index i) const { return gap_r_[i]; }
  Real gap_z(Index j) const { return gap_z_[j]; }

  /// Number of active radial cells in row j (full width below the step, core
  /// only above it).
  Index row_extent(Index j) const { return j < nz_shared_ ? nr() : nr_core_; }
  /// Number of active axial cells in column i.
  Index col_extent(Index i) const { return i < nr_core_ ? nz() : nz_shared_; }

  bool in_mask(Index i, Index j) const {
    return i >= 0 && j >= 0 && i < nr() && j < col_extent(i);
  }
  Index active_cells() const { return active_cells_; }

  int layer(Index i) const { return layer_of_r_[i]; }

  /// Radial control width of cell i: half-sum of the center gaps on both
  /// sides, with the mirror-ghost gap at the global ends. Row-independent, so
  /// the r*hbar*etabar cell weights telescope the flux sums exactly even at
  /// the step corner.
  Real control_r(Index i) const { return 0.5 * (gap_r_[i] + gap_r_[i + 1]); }
  Real control_z(Index j) const { return 0.5 * (gap_z_[j] + gap_z_[j + 1]); }

  /// Flux-face radius below cell i: exactly 0 at the axis, else the mean of
  /// the adjacent centers.
  Real face_r_lo(Index i) const {
    return i == 0 ? 0.0 : 0.5 * (r_center_[i - 1] + r_center_[i]);
  }
  /// Flux-face radius above cell i in a row of n cells; the outermost face is
  /// the geometric cell edge.
  Real face_r_hi(Index i, Index n) const {
    return i == n - 1 ? r_center_[i] + 0.5 * width_r_[i]
                      : 0.5 * (r_center_[i] + r_center_[i + 1]);
  }

  const std::vector<Real>& r_centers() const { return r_center_; }
  const std::vector<Real>& z_centers() const { return z_center_; }

 private:
  DomainSpec domain_;
  GridSpec spec_;
  std::vector<Real> r_center_, z_center_;
  std::vector<Real> width_r_, width_z_;
  std::vector<Real> gap_r_, gap_z_;  // size nr+1 / nz+1
  std::vector<int> layer_of_r_;
  Index nr_core_ = 0;
  Index nz_shared_ = 0;
  Index active_cells_ = 0;
};

Grid build_grid(const DomainSpec& domain, const GridSpec& spec);

/// Metric quantities of one masked cell; throws ConfigError out of mask.
CellMetrics cell_metrics(const Grid& grid, Index i, Index j);

/// Layer id of a masked cell; throws ConfigError out of mask.
int layer_index(const Grid& grid, Index i, Index j);

}  // namespace pulsecell
