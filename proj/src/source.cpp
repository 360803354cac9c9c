#include "pulsecell/source.hpp"

#include <cmath>

namespace pulsecell {

void SourceSpec::validate() const {
  if (!(t_per > 0)) throw ConfigError("source.t_per: must be > 0");
  if (!(t_src > 0 && t_src <= t_per))
    throw ConfigError("source.t_src: must satisfy 0 < t_src <= t_per");
  if (!(t_trs > 0 && t_trs < t_src))
    throw ConfigError("source.t_trs: must satisfy 0 < t_trs < t_src");
  if (!(xi > 0)) throw ConfigError("source.xi: must be > 0");
  if (!(zeta > 0)) throw ConfigError("source.zeta: must be > 0");
  if (I0 < 0) throw ConfigError("source.I0: must be >= 0");
}

Real pulse_rect(Real t, const SourceSpec& spec) {
  const Real phase = std::fmod(t, spec.t_per);
  return phase < spec.t_src ? 1.0 : 0.0;
}

Real pulse_transient(Real t, const SourceSpec& spec) {
  // One bracket term is indistinguishable from 0 or a saturated constant once
  // both erf arguments pass ~6.5 in magnitude (erf(6.5) is within 1e-19 of 1),
  // so only periods near t contribute. Arguments are formed from the in-period
  // phase (fmod is exact), keeping full precision at the edges for large t.
  const Real phase = std::fmod(t, spec.t_per);
  const Real margin = spec.t_trs / spec.zeta * (1.0 + 6.5 / spec.xi);
  const long elapsed = std::llround((t - phase) / spec.t_per);
  const long back_hi = std::min(
      elapsed, 1 + static_cast<long>(std::ceil((spec.t_src + margin) / spec.t_per)));
  const Real scale = spec.xi * spec.zeta / spec.t_trs;
  Real sum = 0.0;
  for (long m = -1; m <= back_hi; ++m) {
    const Real u = phase + static_cast<Real>(m) * spec.t_per;  // t - n*t_per
    sum += std::erf(scale * u - spec.xi) - std::erf(scale * (u - spec.t_src) - spec.xi);
  }
  return 0.5 * sum;
}

Real pulse_value(Real t, const SourceSpec& spec) {
  return spec.waveform == Waveform::Rectangular ? pulse_rect(t, spec)
                                                : pulse_transient(t, spec);
}

Real source_term(Real T, Real t, int layer, int source_layer,
                 const MaterialTable& source_material, const SourceSpec& spec,
                 RangePolicy policy) {
  if (layer != source_layer) return 0.0;
  if (!source_material.has_resistivity())
    throw ConfigError("material " + source_material.name() +
                      ": source layer needs a resistivity table");
  const Real p = pulse_value(t, spec);
  if (p == 0.0) return 0.0;
  return source_material.eval(Property::Resistivity, T, policy) *
         spec.current_factor() * p;
}

JouleSource::JouleSource(SourceSpec spec, int source_layer,
                         const MaterialTable& source_material, RangePolicy policy)
    : spec_(spec),
      source_layer_(source_layer),
      material_(&source_material),
      policy_(policy),
      amplitude_(spec.current_factor()) {
  spec_.validate();
  if (!(spec_.S_C > 0)) throw ConfigError("source.S_C: must be > 0");
  if (spec_.I0 > 0 && !material_->has_resistivity())
    throw ConfigError("material " + material_->name() +
                      ": source layer needs a resistivity table");
}

}  // namespace pulsecell
