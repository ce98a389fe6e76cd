#include "pairsim/free_modes.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pairsim {

Matrix2 free_hamiltonian(double p, const Constants& constants) noexcept {
  const double c = constants.c();
  const double mass = constants.c2();
  return {Complex{mass}, Complex{c * p}, Complex{c * p}, Complex{-mass}};
}

double free_energy(double p, const Constants& constants) noexcept {
  const double c = constants.c();
  return std::sqrt(p * p * c * c + constants.c2() * constants.c2());
}

FreeMode make_mode(const GridSpec& grid, const Constants& constants, int k, Branch branch) {
  if (!grid.contains(k)) throw std::out_of_range("momentum index " + std::to_string(k) + " is not on the grid");
  return make_mode(grid.momentum(k), k, constants, branch);
}

FreeMode make_mode(double p, int k, const Constants& constants, Branch branch) {
  FreeMode mode;
  mode.k = k;
  mode.p = p;
  mode.branch = branch;
  const double cp = constants.c() * mode.p;
  const double energy = free_energy(mode.p, constants);
  // Unnormalized eigenvectors: (c^2 + E, cp) for +E and (-cp, c^2 + E) for -E.
  // c^2 + E > |cp| always, so the dominant entry is already real positive.
  const double big = constants.c2() + energy;
  const double norm = std::hypot(big, cp);
  if (branch == Branch::positive) {
    mode.energy = energy;
    mode.spinor = {Complex{big / norm}, Complex{cp / norm}};
  } else {
    mode.energy = -energy;
    mode.spinor = {Complex{-cp / norm}, Complex{big / norm}};
  }
  return mode;
}

std::vector<FreeMode> free_modes(const GridSpec& grid, const Constants& constants) {
  std::vector<FreeMode> modes;
  modes.reserve(2 * grid.size());
  for (Branch b : {Branch::positive, Branch::negative})
    for (int k = grid.min_index(); k <= grid.max_index(); ++k) modes.push_back(make_mode(grid, constants, k, b));
  return modes;
}

TwoSpinorField mode_wavefunction(const FreeMode& mode, const GridSpec& grid) {
  if (!grid.contains(mode.k)) throw std::out_of_range("mode momentum is not on the grid");
  TwoSpinorField field(grid, Representation::position);
  auto up = field.upper();
  auto lo = field.lower();
  const double amp = 1.0 / std::sqrt(grid.length());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const Complex wave = std::polar(amp, mode.p * grid.position(j));
    up[j] = wave * mode.spinor[0];
    lo[j] = wave * mode.spinor[1];
  }
  return field;
}

TwoSpinorField mode_momentum_state(const FreeMode& mode, const GridSpec& grid) {
  TwoSpinorField field(grid, Representation::momentum);
  const std::size_t m = grid.slot_of_index(mode.k);
  field.upper()[m] = mode.spinor[0];
  field.lower()[m] = mode.spinor[1];
  return field;
}

Complex project(const FreeMode& mode, const TwoSpinorField& state, const GridSpec& grid) {
  if (state.representation() != Representation::momentum)
    throw std::invalid_argument("project: state must be in momentum representation");
  const std::size_t m = grid.slot_of_index(mode.k);
  return std::conj(mode.spinor[0]) * state.upper()[m] + std::conj(mode.spinor[1]) * state.lower()[m];
}

}  // namespace pairsim
