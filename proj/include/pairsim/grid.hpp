#pragma once

#include <cstddef>
#include <vector>

namespace pairsim {

inline constexpr double kDefaultSpeedOfLight = 137.035999084;

/// Physical constants in atomic units. Every length, time and energy quoted
/// in units of c (x/c, x/c^2, x*c^2) is converted with this one value.
class Constants {
 public:
  explicit Constants(double c = kDefaultSpeedOfLight);

  double c() const noexcept { return c_; }
  double c2() const noexcept { return c_ * c_; }

 private:
  double c_;
};

/// Periodic box [-L/2, L/2) sampled at N points, together with the discrete
/// momenta p_k = 2 pi k / L, k in [-N/2, N/2).
///
/// Momentum-space arrays are stored in FFT slot order: slot m holds k = m
/// for m < N/2 and k = m - N otherwise.
class GridSpec {
 public:
  GridSpec(double length, std::size_t points);

  double length() const noexcept { return length_; }
  std::size_t size() const noexcept { return points_; }
  double dz() const noexcept { return length_ / static_cast<double>(points_); }

  double position(std::size_t j) const noexcept { return positions_[j]; }
  const std::vector<double>& positions() const noexcept { return positions_; }

  int min_index() const noexcept { return -static_cast<int>(points_ / 2); }
  int max_index() const noexcept { return static_cast<int>(points_ / 2) - 1; }
  bool contains(int k) const noexcept { return k >= min_index() && k <= max_index(); }

  /// Momentum index held in FFT slot m.
  int index_of_slot(std::size_t m) const noexcept {
    return m < points_ / 2 ? static_cast<int>(m) : static_cast<int>(m) - static_cast<int>(points_);
  }
  /// FFT slot holding momentum index k. Throws std::out_of_range off-grid.
  std::size_t slot_of_index(int k) const;

  double momentum(int k) const noexcept;
  double momentum_step() const noexcept;
  /// Largest |p| present on the grid (the Nyquist magnitude).
  double max_momentum() const noexcept { return momentum(min_index()) * -1.0; }
  /// Momenta in FFT slot order.
  const std::vector<double>& momenta() const noexcept { return momenta_; }

  /// Index of the momentum closest to p; throws if p is not a grid momentum
  /// within a relative tolerance of 1e-9 of the spacing.
  int index_of_momentum(double p) const;

 private:
  double length_;
  std::size_t points_;
  std::vector<double> positions_;
  std::vector<double> momenta_;
};

/// Validating constructor: L > 0, N even and at least 8.
GridSpec build_grid(double length, std::size_t points);

}  // namespace pairsim
