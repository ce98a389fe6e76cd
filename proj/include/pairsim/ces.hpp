#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pairsim/amplitudes.hpp"
#include "pairsim/free_modes.hpp"

namespace pairsim {

/// Abscissa and smoothing window of the conversion energy spectrum (a.u.).
struct CesSpec {
  double e_min = 0.0;
  double e_max = 0.0;
  std::size_t points = 1000;
  double window = 0.0;

  /// 2c^2 <= e_min < e_max, points >= 2, window > 0.
  void validate(const Constants& constants) const;
  double step() const noexcept { return (e_max - e_min) / static_cast<double>(points - 1); }
  double energy(std::size_t i) const noexcept { return e_min + static_cast<double>(i) * step(); }
};

/// E_p - E_n = sqrt(p^2c^2 + c^4) + sqrt(n^2c^2 + c^4).
double conversion_energy(const FreeMode& positive, const FreeMode& negative);

/// Conversion energy of every (p, n) pair in the matrix, p-major.
std::vector<double> pair_energies(const AmplitudeMatrix& u);

struct SpectrumPoint {
  double energy = 0.0;
  double density = 0.0;
};

/// rho(E_i) = (sum of |U_{p,n}|^2 over pairs with |E_{p,n} - E_i| <= window/2) / window.
std::vector<SpectrumPoint> ces_spectrum(const AmplitudeMatrix& u, std::size_t sample, const CesSpec& spec);

/// Yield-weighted average conversion energy; throws std::domain_error when N(t) = 0.
double mean_conversion_energy(const AmplitudeMatrix& u, std::size_t sample);

/// Predicted conversion-energy line n1 w1 + n2 w2 + k V0.
struct ChannelSpec {
  int n1 = 0;
  int n2 = 0;
  int k = 0;
  double energy = 0.0;
  std::string label;
};

/// Human label such as "2w1", "w1+w2", "3w1-w2", "w1+V0" or "V0".
std::string channel_label(int n1, int n2, int k);

/// Every integer combination with |n1| + |n2| <= order_max (counts >= 0
/// unless emission is allowed), k in {0, 1} with k = 1 only for V0 > 0, and
/// energy in [lo, hi]. Duplicates within 1e-9 collapse onto the lowest-order
/// combination. Sorted by energy; may be empty.
std::vector<ChannelSpec> channel_lattice(std::span<const double> frequencies, double v0, double lo, double hi,
                                         int order_max, bool allow_emission);

struct ChannelYield {
  ChannelSpec channel;
  std::vector<double> yield_at;  // per sample time
  double fraction_of_total = 0.0;  // at the final sample
};

struct ChannelAssignment {
  std::vector<ChannelYield> channels;
  std::vector<double> unassigned;
  std::vector<double> total;
};

/// Assigns each pair's |U|^2 to the nearest channel within `tolerance`
/// (pair space, not the binned spectrum); the rest is unassigned. Throws
/// std::invalid_argument when tolerance exceeds half the smallest channel spacing.
ChannelAssignment channel_yields(const AmplitudeMatrix& u, std::span<const ChannelSpec> channels, double tolerance);

struct Peak {
  double energy = 0.0;
  double height = 0.0;
};

/// Interior local maxima (flat tops count once, at their center) whose
/// topographic prominence is at least `relative_prominence` times the global
/// maximum. Isolated maxima are refined by a 3-point parabola. Sorted by energy.
std::vector<Peak> peak_detect(std::span<const SpectrumPoint> spectrum, double relative_prominence = 0.01);

}  // namespace pairsim
