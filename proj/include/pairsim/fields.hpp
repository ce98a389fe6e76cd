#pragma once

#include <vector>

#include "pairsim/grid.hpp"

namespace pairsim {

/// Sauter well geometry: edge width W and extension D (a.u.).
struct WellShape {
  double width = 0.0;
  double extension = 0.0;
};

enum class TermKind { static_step, sinusoid };

/// One additive contribution to the potential height V(t).
///
/// A static step switches on sharply at t = 0 unless a ramp is given, in which
/// case its amplitude rises as sin^2(pi t / (2 ramp)) over [0, ramp]. The ramp
/// applies to sinusoids the same way.
struct TimeTerm {
  TermKind kind = TermKind::static_step;
  double amplitude = 0.0;
  double frequency = 0.0;
  double phase = 0.0;
  double ramp = 0.0;

  static TimeTerm step(double amplitude) { return {TermKind::static_step, amplitude, 0.0, 0.0, 0.0}; }
  static TimeTerm sine(double amplitude, double frequency, double phase = 0.0) {
    return {TermKind::sinusoid, amplitude, frequency, phase, 0.0};
  }
};

/// V(z,t) = V(t) S(z). An empty term list means free evolution.
struct FieldConfig {
  WellShape shape;
  std::vector<TimeTerm> terms;

  /// Throws std::invalid_argument naming the offending value.
  void validate() const;
  /// True when V(t) does not vary for t > 0 (only unramped static steps).
  bool is_static() const noexcept;
  /// Sum of static-step amplitudes.
  double static_height() const noexcept;
  /// Frequencies of the sinusoid terms, in declaration order.
  std::vector<double> frequencies() const;
};

/// S(z) = {tanh[(z - D/2)/W] - tanh[(z + D/2)/W]} / 2.
double sauter_shape(double z, const WellShape& shape) noexcept;

/// V(t); t must be nonnegative.
double potential_height(const FieldConfig& config, double t);

/// Spatial factor S(z_j) on the grid.
std::vector<double> shape_profile(const WellShape& shape, const GridSpec& grid);

/// V(t) S(z_j) on the grid.
std::vector<double> potential_profile(const FieldConfig& config, const GridSpec& grid, double t);

}  // namespace pairsim
