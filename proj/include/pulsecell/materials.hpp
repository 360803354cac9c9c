#pragma once

#include <atomic>
#include <cstdint>
#include <string>
#include <vector>

#include "pulsecell/errors.hpp"
#include "pulsecell/types.hpp"

namespace pulsecell {

enum class Property { HeatCapacity, Conductivity, Resistivity };
enum class RangePolicy { Clamp, Strict };

/// Face-conductivity rule at cell interfaces.
///   MeanTemperature: lambda_m((Ta+Tb)/2) with the lower-index cell's table.
///   MeanLambda:      (lambda_m(Ta)+lambda_m(Tb))/2, same table choice.
///   TwoSidedHarmonic: harmonic mean of each side's own conductivity.
enum class HalfPointRule { MeanTemperature, MeanLambda, TwoSidedHarmonic };

/// Piecewise-linear property curve over strictly increasing temperature knots.
/// Exact at knots, bounded by neighboring knot values in between.
class PropertyTable {
 public:
  PropertyTable() = default;
  PropertyTable(std::vector<Real> knots_T, std::vector<Real> values);

  bool empty() const { return t_.empty(); }
  size_t size() const { return t_.size(); }
  Real t_min() const { return t_.front(); }
  Real t_max() const { return t_.back(); }
  bool covers(Real lo, Real hi) const {
    return !empty() && t_min() <= lo && hi <= t_max();
  }
  bool in_range(Real T) const { return !empty() && T >= t_.front() && T <= t_.back(); }

  /// Clamped evaluation; range policy is enforced by the owning table.
  Real operator()(Real T) const {
    if (T <= t_.front()) return v_.front();
    if (T >= t_.back()) return v_.back();
    size_t k = 1;
    while (t_[k] < T) ++k;  // tables are short; linear scan beats binary search
    const Real w = (T - t_[k - 1]) / (t_[k] - t_[k - 1]);
    return v_[k - 1] + w * (v_[k] - v_[k - 1]);
  }

  const std::vector<Real>& knots() const { return t_; }
  const std::vector<Real>& values() const { return v_; }

 private:
  std::vector<Real> t_, v_;
};

/// One layer's material: constant density plus temperature-dependent heat
/// capacity, conductivity and (for current-carrying layers) resistivity.
class MaterialTable {
 public:
  MaterialTable() = default;
  MaterialTable(std::string name, Real rho, PropertyTable cv, PropertyTable lambda,
                PropertyTable chi = {});

  MaterialTable(const MaterialTable& other);
  MaterialTable& operator=(const MaterialTable& other);

  const std::string& name() const { return name_; }
  Real rho() const { return rho_; }
  const PropertyTable& table(Property which) const {
    switch (which) {
      case Property::HeatCapacity: return cv_;
      case Property::Conductivity: return lambda_;
      case Property::Resistivity: return chi_;
    }
    return cv_;
  }
  bool has_resistivity() const { return !chi_.empty(); }

  Real eval(Property which, Real T, RangePolicy policy = RangePolicy::Clamp) const {
    const PropertyTable& t = table(which);
    if (t.empty() || !t.in_range(T)) out_of_range(which, T, policy);
    return t(T);
  }

  /// Number of clamped out-of-range evaluations observed so far.
  std::uint64_t clamp_events() const { return clamp_events_.load(std::memory_order_relaxed); }

 private:
  void out_of_range(Property which, Real T, RangePolicy policy) const;

  std::string name_;
  Real rho_ = 0;
  PropertyTable cv_, lambda_, chi_;
  mutable std::atomic<std::uint64_t> clamp_events_{0};
};

Real eval_property(const MaterialTable& table, Property which, Real T,
                   RangePolicy policy = RangePolicy::Clamp);

/// Conductivity at a cell face, evaluated at the mean of the two adjacent
/// cell temperatures.
inline Real half_point_lambda(const MaterialTable& table, Real T_a, Real T_b,
                              RangePolicy policy = RangePolicy::Clamp) {
  return table.eval(Property::Conductivity, 0.5 * (T_a + T_b), policy);
}

/// Face conductivity between the cell owning the face (lower index side, table
/// `own`) and its neighbor (table `other`), under the configured rule.
inline Real face_lambda(const MaterialTable& own, const MaterialTable& other, Real T_own,
                        Real T_other, HalfPointRule rule,
                        RangePolicy policy = RangePolicy::Clamp) {
  switch (rule) {
    case HalfPointRule::MeanTemperature:
      return half_point_lambda(own, T_own, T_other, policy);
    case HalfPointRule::MeanLambda:
      return 0.5 * (own.eval(Property::Conductivity, T_own, policy) +
                    own.eval(Property::Conductivity, T_other, policy));
    case HalfPointRule::TwoSidedHarmonic: {
      const Real la = own.eval(Property::Conductivity, T_own, policy);
      const Real lb = other.eval(Property::Conductivity, T_other, policy);
      return 2.0 * la * lb / (la + lb);
    }
  }
  return 0;
}

/// Named material collection loaded from one file; immutable once resolved.
class MaterialSet {
 public:
  void add(MaterialTable table);
  const MaterialTable& by_name(const std::string& name) const;
  bool contains(const std::string& name) const;
  size_t size() const { return tables_.size(); }
  const std::vector<MaterialTable>& tables() const { return tables_; }

 private:
  std::vector<MaterialTable> tables_;
};

/// Per-layer material pointers in layer order.
using LayerMaterials = std::vector<const MaterialTable*>;

LayerMaterials resolve_layers(const MaterialSet& set,
                              const std::vector<std::string>& layer_names);

}  // namespace pulsecell
