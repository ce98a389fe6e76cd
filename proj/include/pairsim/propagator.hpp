#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "pairsim/fields.hpp"
#include "pairsim/free_modes.hpp"
#include "pairsim/grid.hpp"
#include "pairsim/spinor_field.hpp"

namespace pairsim {

/// Uniform time stepping over [0, t_total] with snapshots at a sorted subset
/// of step boundaries.
struct Schedule {
  double t_total = 0.0;
  std::size_t steps = 1;
  std::vector<std::size_t> sample_steps;

  /// samples + 1 snapshots at boundaries round(i * steps / samples),
  /// i = 0..samples (t = 0 included).
  static Schedule uniform(double t_total, std::size_t steps, std::size_t samples);

  double dt() const noexcept { return t_total / static_cast<double>(steps); }
  double time_at(std::size_t step) const noexcept {
    return t_total * static_cast<double>(step) / static_cast<double>(steps);
  }
  std::vector<double> sample_times() const;
  void validate() const;
};

/// exp(-i H0(p_k) tau) for every momentum slot, from the closed form
/// cos(E tau) I - i sin(E tau) H0 / E.
class KineticPhaseTable {
 public:
  KineticPhaseTable(const GridSpec& grid, const Constants& constants, double tau);

  double tau() const noexcept { return tau_; }
  std::size_t size() const noexcept { return entries_.size(); }
  const Matrix2& entry(std::size_t slot) const noexcept { return entries_[slot]; }

  /// Multiplies every slot of a momentum-representation state by its 2x2 factor.
  void apply(TwoSpinorField& state) const;

 private:
  double tau_;
  std::vector<Matrix2> entries_;
};

/// One exact free-Hamiltonian half step (table built with tau = dt/2).
void kinetic_half_step(TwoSpinorField& state, const KineticPhaseTable& table);

/// Multiplies both components at z_j by e^{-i profile_j dt}.
void potential_step(TwoSpinorField& state, std::span<const double> profile, double dt);

/// Potential phase factors e^{-i V(t_m + dt/2, z_j) dt} for every step,
/// stored once when the field is time independent.
class PotentialPhases {
 public:
  PotentialPhases(const FieldConfig& config, const GridSpec& grid, const Schedule& schedule);

  std::span<const Complex> step(std::size_t m) const noexcept {
    const std::size_t row = per_step_ ? m : 0;
    return {table_.data() + row * points_, points_};
  }
  std::size_t bytes() const noexcept { return table_.size() * sizeof(Complex); }

 private:
  std::size_t points_;
  bool per_step_;
  ComplexBuffer table_;
};

/// Bytes a PotentialPhases instance would need, without allocating it.
std::size_t potential_phase_bytes(const FieldConfig& config, const GridSpec& grid, const Schedule& schedule);

/// Strang-split propagator for a fixed (grid, field, schedule):
/// K(dt/2) V(t + dt/2) K(dt/2) per step, with adjacent half kinetic factors
/// merged between steps that are not sampled.
///
/// Immutable after construction; run() may be called concurrently.
class Propagator {
 public:
  using SampleSink = std::function<void(std::size_t sample, const TwoSpinorField& momentum_state)>;

  Propagator(const GridSpec& grid, const Constants& constants, const FieldConfig& config, const Schedule& schedule);

  const GridSpec& grid() const noexcept { return grid_; }
  const Schedule& schedule() const noexcept { return schedule_; }

  /// Evolves a momentum-representation state through the whole schedule,
  /// handing the momentum-space state to `sink` at every sample time.
  void run(TwoSpinorField state, const SampleSink& sink) const;

  /// One full Strang step from boundary m; position representation in and out.
  TwoSpinorField step(const TwoSpinorField& position_state, std::size_t m) const;

 private:
  GridSpec grid_;
  Schedule schedule_;
  std::shared_ptr<const FourierTransform> fft_;
  KineticPhaseTable half_;
  KineticPhaseTable full_;
  PotentialPhases phases_;
};

/// Single Strang step starting at t (which must be a step boundary of the schedule).
TwoSpinorField strang_step(const TwoSpinorField& state, double t, const Schedule& schedule,
                           const FieldConfig& config, const GridSpec& grid, const Constants& constants);

/// Position-representation snapshots of the evolved mode at every sample time.
std::vector<TwoSpinorField> evolve(const FreeMode& initial, const Schedule& schedule, const FieldConfig& config,
                                   const GridSpec& grid, const Constants& constants);

}  // namespace pairsim
