#include "pulsecell/geometry.hpp"

#include <cmath>

namespace pulsecell {

void DomainSpec::validate() const {
  if (layer_radii.empty()) throw ConfigError("domain.layer_radii: empty");
  Real prev = 0.0;
  for (size_t m = 0; m < layer_radii.size(); ++m) {
    if (!(layer_radii[m] > prev))
      throw ConfigError("domain.layer_radii: must be strictly increasing and positive");
    prev = layer_radii[m];
  }
  if (!(core_length > 0)) throw ConfigError("domain.core_length: must be > 0");
  if (!(outer_length > 0)) throw ConfigError("domain.outer_length: must be > 0");
  if (outer_length > core_length)
    throw ConfigError("domain.outer_length: exceeds core_length");
  if (layer_materials.size() != layer_radii.size())
    throw ConfigError("domain.layer_materials: needs one entry per layer");
  if (source_layer < 0 || source_layer >= layer_count())
    throw ConfigError("domain.source_layer: out of range");
}

Real DomainSpec::source_cross_section() const {
  const Real ro = layer_radii[source_layer];
  const Real ri = layer_inner_radius(source_layer);
  return M_PI * (ro * ro - ri * ri);
}

void GridSpec::validate(const DomainSpec& domain) const {
  if (radial_divisions.size() != domain.layer_radii.size())
    throw ConfigError("grid.radial_divisions: needs one entry per layer");
  for (int n : radial_divisions)
    if (n < 1) throw ConfigError("grid.radial_divisions: all counts must be >= 1");
  if (axial_divisions_core < 1)
    throw ConfigError("grid.axial_divisions_core: must be >= 1");
  if (axial_divisions_outer < 1)
    throw ConfigError("grid.axial_divisions_outer: must be >= 1");
}

Grid::Grid(DomainSpec domain, GridSpec spec)
    : domain_(std::move(domain)), spec_(std::move(spec)) {
  domain_.validate();
  spec_.validate(domain_);

  // Radial centers: uniform boxes inside each layer zone.
  for (int m = 0; m < domain_.layer_count(); ++m) {
    const Real lo = domain_.layer_inner_radius(m);
    const Real hi = domain_.layer_radii[m];
    const int n = spec_.radial_divisions[m];
    const Real w = (hi - lo) / n;
    for (int q = 0; q < n; ++q) {
      r_center_.push_back(lo + (q + 0.5) * w);
      width_r_.push_back(w);
      layer_of_r_.push_back(m);
    }
  }
  nr_core_ = spec_.radial_divisions[0];

  // Axial centers: shared zone [0, z_0] for all layers, then the core rod's
  // extension [z_0, z_max] with the core's own step.
  const Real z0 = domain_.outer_length;
  const Real zmax = domain_.core_length;
  nz_shared_ = spec_.axial_divisions_outer;
  {
    const Real w = z0 / spec_.axial_divisions_outer;
    for (int q = 0; q < spec_.axial_divisions_outer; ++q) {
      z_center_.push_back((q + 0.5) * w);
      width_z_.push_back(w);
    }
  }
  if (zmax > z0) {
    const Real core_step = zmax / spec_.axial_divisions_core;
    const Index n_ext =
        std::max<Index>(1, static_cast<Index>(std::llround((zmax - z0) / core_step)));
    const Real w = (zmax - z0) / n_ext;
    for (Index q = 0; q < n_ext; ++q) {
      z_center_.push_back(z0 + (q + 0.5) * w);
      width_z_.push_back(w);
    }
  }

  gap_r_.resize(r_center_.size() + 1);
  gap_r_.front() = width_r_.front();
  gap_r_.back() = width_r_.back();
  for (size_t i = 1; i < r_center_.size(); ++i)
    gap_r_[i] = r_center_[i] - r_center_[i - 1];

  gap_z_.resize(z_center_.size() + 1);
  gap_z_.front() = width_z_.front();
  gap_z_.back() = width_z_.back();
  for (size_t j = 1; j < z_center_.size(); ++j)
    gap_z_[j] = z_center_[j] - z_center_[j - 1];

  for (Index i = 0; i < nr(); ++i) active_cells_ += col_extent(i);
}

Grid build_grid(const DomainSpec& domain, const GridSpec& spec) {
  return Grid(domain, spec);
}

CellMetrics cell_metrics(const Grid& grid, Index i, Index j) {
  if (!grid.in_mask(i, j))
    throw ConfigError("cell_metrics: index (" + std::to_string(i) + "," +
                      std::to_string(j) + ") outside the domain mask");
  const Index n = grid.row_extent(j);
  return CellMetrics{grid.r_center(i), grid.control_r(i), grid.control_z(j),
                     grid.face_r_lo(i), grid.face_r_hi(i, n)};
}

int layer_index(const Grid& grid, Index i, Index j) {
  if (!grid.in_mask(i, j))
    throw ConfigError("layer_index: index (" + std::to_string(i) + "," +
                      std::to_string(j) + ") outside the domain mask");
  return grid.layer(i);
}

}  // namespace pulsecell
