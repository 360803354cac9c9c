#include "pulsecell/materials.hpp"

#include <algorithm>

namespace pulsecell {

PropertyTable::PropertyTable(std::vector<Real> knots_T, std::vector<Real> values)
    : t_(std::move(knots_T)), v_(std::move(values)) {
  if (t_.size() != v_.size()) throw ConfigError("property table: knot/value size mismatch");
  if (t_.empty()) return;
  for (size_t k = 1; k < t_.size(); ++k)
    if (!(t_[k] > t_[k - 1]))
      throw ConfigError("property table: temperature knots must be strictly increasing");
}

MaterialTable::MaterialTable(std::string name, Real rho, PropertyTable cv,
                             PropertyTable lambda, PropertyTable chi)
    : name_(std::move(name)),
      rho_(rho),
      cv_(std::move(cv)),
      lambda_(std::move(lambda)),
      chi_(std::move(chi)) {
  if (!(rho_ > 0)) throw ConfigError("material " + name_ + ": rho must be > 0");
  if (cv_.empty()) throw ConfigError("material " + name_ + ": missing heat capacity table");
  if (lambda_.empty()) throw ConfigError("material " + name_ + ": missing conductivity table");
  auto all_positive = [](const PropertyTable& t, bool allow_zero) {
    for (Real v : t.values())
      if (allow_zero ? v < 0 : !(v > 0)) return false;
    return true;
  };
  if (!all_positive(cv_, false))
    throw ConfigError("material " + name_ + ": heat capacity values must be > 0");
  if (!all_positive(lambda_, false))
    throw ConfigError("material " + name_ + ": conductivity values must be > 0");
  if (!all_positive(chi_, true))
    throw ConfigError("material " + name_ + ": resistivity values must be >= 0");
}

MaterialTable::MaterialTable(const MaterialTable& other)
    : name_(other.name_),
      rho_(other.rho_),
      cv_(other.cv_),
      lambda_(other.lambda_),
      chi_(other.chi_),
      clamp_events_(other.clamp_events_.load(std::memory_order_relaxed)) {}

MaterialTable& MaterialTable::operator=(const MaterialTable& other) {
  if (this != &other) {
    name_ = other.name_;
    rho_ = other.rho_;
    cv_ = other.cv_;
    lambda_ = other.lambda_;
    chi_ = other.chi_;
    clamp_events_.store(other.clamp_events_.load(std::memory_order_relaxed),
                        std::memory_order_relaxed);
  }
  return *this;
}

void MaterialTable::out_of_range(Property which, Real T, RangePolicy policy) const {
  const PropertyTable& t = table(which);
  if (t.empty())
    throw TableRangeError("material " + name_ + ": property table missing");
  if (policy == RangePolicy::Strict)
    throw TableRangeError("material " + name_ + ": T=" + std::to_string(T) +
                          " outside table range [" + std::to_string(t.t_min()) + ", " +
                          std::to_string(t.t_max()) + "]");
  clamp_events_.fetch_add(1, std::memory_order_relaxed);
}

Real eval_property(const MaterialTable& table, Property which, Real T, RangePolicy policy) {
  return table.eval(which, T, policy);
}

void MaterialSet::add(MaterialTable table) {
  if (contains(table.name()))
    throw ConfigError("duplicate material name: " + table.name());
  tables_.push_back(std::move(table));
}

const MaterialTable& MaterialSet::by_name(const std::string& name) const {
  for (const auto& t : tables_)
    if (t.name() == name) return t;
  throw ConfigError("unknown material: " + name);
}

bool MaterialSet::contains(const std::string& name) const {
  for (const auto& t : tables_)
    if (t.name() == name) return true;
  return false;
}

LayerMaterials resolve_layers(const MaterialSet& set,
                              const std::vector<std::string>& layer_names) {
  LayerMaterials out;
  out.reserve(layer_names.size());
  for (const auto& n : layer_names) out.push_back(&set.by_name(n));
  return out;
}

}  // namespace pulsecell
