#include "pairsim/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pairsim {

Schedule Schedule::uniform(double t_total, std::size_t steps, std::size_t samples) {
  if (samples == 0) throw std::invalid_argument("schedule needs at least one sample interval");
  Schedule s{t_total, steps, {}};
  for (std::size_t i = 0; i <= samples; ++i) {
    const auto b = static_cast<std::size_t>(
        std::llround(static_cast<double>(i) * static_cast<double>(steps) / static_cast<double>(samples)));
    if (s.sample_steps.empty() || s.sample_steps.back() != b) s.sample_steps.push_back(b);
  }
  s.validate();
  return s;
}

std::vector<double> Schedule::sample_times() const {
  std::vector<double> t;
  t.reserve(sample_steps.size());
  for (std::size_t b : sample_steps) t.push_back(time_at(b));
  return t;
}

void Schedule::validate() const {
  if (!(t_total > 0.0) || !std::isfinite(t_total))
    throw std::invalid_argument("schedule: total time must be positive");
  if (steps < 1) throw std::invalid_argument("schedule: step count must be >= 1");
  if (sample_steps.empty()) throw std::invalid_argument("schedule: no sample times");
  for (std::size_t i = 0; i < sample_steps.size(); ++i) {
    if (sample_steps[i] > steps)
      throw std::invalid_argument("schedule: sample step " + std::to_string(sample_steps[i]) + " beyond the last step");
    if (i > 0 && sample_steps[i] <= sample_steps[i - 1])
      throw std::invalid_argument("schedule: sample steps must be strictly increasing");
  }
}

KineticPhaseTable::KineticPhaseTable(const GridSpec& grid, const Constants& constants, double tau)
    : tau_(tau), entries_(grid.size()) {
  for (std::size_t m = 0; m < grid.size(); ++m) {
    const double p = grid.momentum(grid.index_of_slot(m));
    const double e = free_energy(p, constants);
    const double cs = std::cos(e * tau);
    const double sn = std::sin(e * tau) / e;
    const Matrix2 h = free_hamiltonian(p, constants);
    const Complex minus_i{0.0, -1.0};
    entries_[m] = {cs + minus_i * sn * h[0], minus_i * sn * h[1], minus_i * sn * h[2], cs + minus_i * sn * h[3]};
  }
}

void KineticPhaseTable::apply(TwoSpinorField& state) const {
  if (state.representation() != Representation::momentum)
    throw std::invalid_argument("kinetic step: state must be in momentum representation");
  if (state.size() != entries_.size()) throw std::invalid_argument("kinetic step: grid size mismatch");
  auto up = state.upper();
  auto lo = state.lower();
  for (std::size_t m = 0; m < entries_.size(); ++m) {
    const Matrix2& u = entries_[m];
    const Complex a = up[m];
    const Complex b = lo[m];
    up[m] = u[0] * a + u[1] * b;
    lo[m] = u[2] * a + u[3] * b;
  }
}

void kinetic_half_step(TwoSpinorField& state, const KineticPhaseTable& table) { table.apply(state); }

void potential_step(TwoSpinorField& state, std::span<const double> profile, double dt) {
  if (state.representation() != Representation::position)
    throw std::invalid_argument("potential step: state must be in position representation");
  if (profile.size() != state.size())
    throw std::invalid_argument("potential step: profile has " + std::to_string(profile.size()) +
                                " points, state has " + std::to_string(state.size()));
  auto up = state.upper();
  auto lo = state.lower();
  for (std::size_t j = 0; j < profile.size(); ++j) {
    const Complex phase = std::polar(1.0, -profile[j] * dt);
    up[j] *= phase;
    lo[j] *= phase;
  }
}

std::size_t potential_phase_bytes(const FieldConfig& config, const GridSpec& grid, const Schedule& schedule) {
  const std::size_t rows = config.is_static() ? 1 : schedule.steps;
  return rows * grid.size() * sizeof(Complex);
}

PotentialPhases::PotentialPhases(const FieldConfig& config, const GridSpec& grid, const Schedule& schedule)
    : points_(grid.size()), per_step_(!config.is_static()) {
  const std::size_t rows = per_step_ ? schedule.steps : 1;
  table_.resize(rows * points_);
  const std::vector<double> shape = shape_profile(config.shape, grid);
  const double dt = schedule.dt();
  for (std::size_t m = 0; m < rows; ++m) {
    const double height = potential_height(config, schedule.time_at(m) + 0.5 * dt);
    Complex* row = table_.data() + m * points_;
    for (std::size_t j = 0; j < points_; ++j) row[j] = std::polar(1.0, -height * shape[j] * dt);
  }
}

Propagator::Propagator(const GridSpec& grid, const Constants& constants, const FieldConfig& config,
                       const Schedule& schedule)
    : grid_(grid),
      schedule_(schedule),
      fft_(FourierTransform::shared(grid)),
      half_(grid, constants, 0.5 * schedule.dt()),
      full_(grid, constants, schedule.dt()),
      phases_(config, grid, schedule) {
  schedule_.validate();
}

namespace {

void apply_phase(TwoSpinorField& state, std::span<const Complex> phase) {
  auto up = state.upper();
  auto lo = state.lower();
  for (std::size_t j = 0; j < phase.size(); ++j) {
    up[j] *= phase[j];
    lo[j] *= phase[j];
  }
}

}  // namespace

void Propagator::run(TwoSpinorField state, const SampleSink& sink) const {
  if (state.size() != grid_.size()) throw std::invalid_argument("propagator: state grid size mismatch");
  if (state.representation() != Representation::momentum)
    throw std::invalid_argument("propagator: initial state must be in momentum representation");
  const auto& samples = schedule_.sample_steps;
  std::size_t next = 0;
  if (samples[next] == 0) sink(next++, state);
  if (next == samples.size()) return;
  half_.apply(state);
  const std::size_t last = samples.back();
  for (std::size_t m = 0; m < last; ++m) {
    fft_->to_position(state);
    apply_phase(state, phases_.step(m));
    fft_->to_momentum(state);
    if (m + 1 == samples[next]) {
      half_.apply(state);
      sink(next++, state);
      if (next == samples.size()) return;
      half_.apply(state);
    } else {
      full_.apply(state);
    }
  }
}

TwoSpinorField Propagator::step(const TwoSpinorField& position_state, std::size_t m) const {
  if (m >= schedule_.steps) throw std::out_of_range("propagator: step index beyond schedule");
  TwoSpinorField s = position_state;
  fft_->to_momentum(s);
  half_.apply(s);
  fft_->to_position(s);
  apply_phase(s, phases_.step(m));
  fft_->to_momentum(s);
  half_.apply(s);
  fft_->to_position(s);
  return s;
}

TwoSpinorField strang_step(const TwoSpinorField& state, double t, const Schedule& schedule,
                           const FieldConfig& config, const GridSpec& grid, const Constants& constants) {
  schedule.validate();
  if (state.representation() != Representation::position)
    throw std::invalid_argument("strang_step: state must be in position representation");
  if (state.size() != grid.size()) throw std::invalid_argument("strang_step: state grid size mismatch");
  const double dt = schedule.dt();
  const double m = t / dt;
  if (std::abs(m - std::round(m)) > 1e-9 || m < -0.5)
    throw std::invalid_argument("strang_step: t is not a step boundary");
  const auto fft = FourierTransform::shared(grid);
  const KineticPhaseTable half(grid, constants, 0.5 * dt);
  const std::vector<double> profile = potential_profile(config, grid, t + 0.5 * dt);
  TwoSpinorField s = state;
  fft->to_momentum(s);
  kinetic_half_step(s, half);
  fft->to_position(s);
  potential_step(s, profile, dt);
  fft->to_momentum(s);
  kinetic_half_step(s, half);
  fft->to_position(s);
  return s;
}

std::vector<TwoSpinorField> evolve(const FreeMode& initial, const Schedule& schedule, const FieldConfig& config,
                                   const GridSpec& grid, const Constants& constants) {
  schedule.validate();
  const Propagator propagator(grid, constants, config, schedule);
  const auto fft = FourierTransform::shared(grid);
  std::vector<TwoSpinorField> snapshots;
  snapshots.reserve(schedule.sample_steps.size());
  propagator.run(mode_momentum_state(initial, grid), [&](std::size_t, const TwoSpinorField& s) {
    TwoSpinorField copy = s;
    fft->to_position(copy);
    snapshots.push_back(std::move(copy));
  });
  return snapshots;
}

}  // namespace pairsim
