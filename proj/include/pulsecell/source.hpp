#pragma once

#include "pulsecell/errors.hpp"
#include "pulsecell/materials.hpp"
#include "pulsecell/types.hpp"

namespace pulsecell {

enum class Waveform { Rectangular, Transient };

/// Pulsed current source parameters. The waveform is a periodic normalized
/// factor in [0,1]; the volumetric power density in the source layer is
/// chi(T) * I0^2 / S_C * p(t) (or / S_C^2 with joule_dimensional).
struct SourceSpec {
  Real t_per = 0;   // pulse period
  Real t_src = 0;   // heating duration per period
  Real t_trs = 0;   // turn-on/turn-off transient duration
  Real xi = 4.0;    // erf sharpness
  Real zeta = 2.0;  // erf scale
  Real I0 = 0;      // current amplitude
  Real S_C = 0;     // source-layer cross-section; <=0 means derive from geometry
  Waveform waveform = Waveform::Transient;
  bool joule_dimensional = false;

  void validate() const;
  Real current_factor() const {
    return joule_dimensional ? I0 * I0 / (S_C * S_C) : I0 * I0 / S_C;
  }
};

/// Rectangular pulse train: 1 on [n*t_per, n*t_per + t_src), else 0. The pulse
/// is on at its start instant.
Real pulse_rect(Real t, const SourceSpec& spec);

/// Erf-smoothed pulse train; sums only the periods whose contribution exceeds
/// the truncation threshold.
Real pulse_transient(Real t, const SourceSpec& spec);

/// Dispatch on spec.waveform.
Real pulse_value(Real t, const SourceSpec& spec);

/// Volumetric power density at temperature T and time t for a cell of the
/// given layer. Zero outside the source layer.
Real source_term(Real T, Real t, int layer, int source_layer,
                 const MaterialTable& source_material, const SourceSpec& spec,
                 RangePolicy policy = RangePolicy::Clamp);

/// Per-cell power density hook for the time stepper. bind_time is called once
/// per half-step (single-threaded); power is then read concurrently.
class SourceModel {
 public:
  virtual ~SourceModel() = default;
  virtual void bind_time(Real t) = 0;
  virtual Real power(Index i, Index j, int layer, Real T) const = 0;
};

class NullSource final : public SourceModel {
 public:
  void bind_time(Real) override {}
  Real power(Index, Index, int, Real) const override { return 0.0; }
};

class JouleSource final : public SourceModel {
 public:
  JouleSource(SourceSpec spec, int source_layer, const MaterialTable& source_material,
              RangePolicy policy);

  void bind_time(Real t) override { pulse_ = pulse_value(t, spec_); }
  Real power(Index, Index, int layer, Real T) const override {
    if (layer != source_layer_ || pulse_ == 0.0) return 0.0;
    return material_->eval(Property::Resistivity, T, policy_) * amplitude_ * pulse_;
  }

  const SourceSpec& spec() const { return spec_; }

 private:
  SourceSpec spec_;
  int source_layer_;
  const MaterialTable* material_;
  RangePolicy policy_;
  Real amplitude_;
  Real pulse_ = 0;
};

}  // namespace pulsecell
