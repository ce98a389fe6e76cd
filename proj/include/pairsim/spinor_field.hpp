#pragma once

#include <cstddef>
#include <memory>
#include <span>

#include "pairsim/grid.hpp"
#include "pairsim/numeric.hpp"

namespace pairsim {

enum class Representation { position, momentum };
enum class Direction { to_momentum, to_position };

/// Two-component wave function on the periodic grid.
///
/// Position representation holds psi(z_j); its squared norm is
/// sum_j |psi(z_j)|^2 dz. Momentum representation holds the plane-wave
/// coefficients <e^{ipz}/sqrt(L)|psi> (FFT slot order); its squared norm is
/// the plain sum of |c_k|^2. The two are related by a unitary transform.
class TwoSpinorField {
 public:
  TwoSpinorField(const GridSpec& grid, Representation rep);

  std::size_t size() const noexcept { return points_; }
  double length() const noexcept { return length_; }
  Representation representation() const noexcept { return rep_; }
  void set_representation(Representation rep) noexcept { rep_ = rep; }

  std::span<Complex> upper() noexcept { return {data_.data(), points_}; }
  std::span<Complex> lower() noexcept { return {data_.data() + points_, points_}; }
  std::span<const Complex> upper() const noexcept { return {data_.data(), points_}; }
  std::span<const Complex> lower() const noexcept { return {data_.data() + points_, points_}; }

  /// Both components, upper block first.
  std::span<Complex> data() noexcept { return data_; }
  std::span<const Complex> data() const noexcept { return data_; }

  /// Integration weight of one sample: dz in position space, 1 in momentum space.
  double weight() const noexcept;
  double squared_norm() const noexcept;

 private:
  std::size_t points_;
  double length_;
  Representation rep_;
  ComplexBuffer data_;
};

/// <a|b> with the representation's integration weight. Both fields must share
/// grid and representation.
Complex inner_product(const TwoSpinorField& a, const TwoSpinorField& b);

/// FFTW plans for one grid size. Plans are created once (under a global lock,
/// FFTW's planner is not reentrant); execution is thread-safe, so a single
/// instance can be shared by any number of workers.
class FourierTransform {
 public:
  explicit FourierTransform(const GridSpec& grid);
  ~FourierTransform();
  FourierTransform(const FourierTransform&) = delete;
  FourierTransform& operator=(const FourierTransform&) = delete;

  /// In-place position -> momentum.
  void to_momentum(TwoSpinorField& state) const;
  /// In-place momentum -> position.
  void to_position(TwoSpinorField& state) const;
  void apply(TwoSpinorField& state, Direction direction) const;

  std::size_t size() const noexcept { return points_; }

  /// Process-wide instance for a given grid (created on first use).
  static std::shared_ptr<const FourierTransform> shared(const GridSpec& grid);

 private:
  struct Plans;
  std::size_t points_;
  double length_;
  std::unique_ptr<Plans> plans_;
};

/// Unitary change of representation; throws std::invalid_argument when the
/// state is not in the direction's source representation.
TwoSpinorField transform(const TwoSpinorField& state, Direction direction);

}  // namespace pairsim
