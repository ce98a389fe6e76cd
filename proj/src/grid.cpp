#include "pairsim/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pairsim {

Constants::Constants(double c) : c_(c) {
  if (!(c > 0.0) || !std::isfinite(c))
    throw std::invalid_argument("speed of light must be positive and finite, got " + std::to_string(c));
}

GridSpec::GridSpec(double length, std::size_t points) : length_(length), points_(points) {
  if (!(length > 0.0) || !std::isfinite(length))
    throw std::invalid_argument("box length must be positive, got " + std::to_string(length));
  if (points < 8 || points % 2 != 0)
    throw std::invalid_argument("grid point count must be even and >= 8, got " + std::to_string(points));
  positions_.resize(points_);
  momenta_.resize(points_);
  const double step = dz();
  for (std::size_t j = 0; j < points_; ++j) positions_[j] = -0.5 * length_ + static_cast<double>(j) * step;
  for (std::size_t m = 0; m < points_; ++m) momenta_[m] = momentum(index_of_slot(m));
}

std::size_t GridSpec::slot_of_index(int k) const {
  if (!contains(k)) throw std::out_of_range("momentum index " + std::to_string(k) + " is not on the grid");
  return k >= 0 ? static_cast<std::size_t>(k) : static_cast<std::size_t>(k + static_cast<int>(points_));
}

double GridSpec::momentum(int k) const noexcept { return static_cast<double>(k) * momentum_step(); }

double GridSpec::momentum_step() const noexcept { return 2.0 * std::numbers::pi / length_; }

int GridSpec::index_of_momentum(double p) const {
  const double x = p / momentum_step();
  const double k = std::round(x);
  if (std::abs(x - k) > 1e-9 || !contains(static_cast<int>(k)))
    throw std::out_of_range("momentum " + std::to_string(p) + " is not on the grid");
  return static_cast<int>(k);
}

GridSpec build_grid(double length, std::size_t points) { return GridSpec(length, points); }

}  // namespace pairsim
