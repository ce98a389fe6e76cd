#pragma once

#include <array>
#include <span>
#include <vector>

#include "pairsim/grid.hpp"
#include "pairsim/numeric.hpp"
#include "pairsim/spinor_field.hpp"

namespace pairsim {

enum class Branch { positive, negative };

using Spinor = std::array<Complex, 2>;
/// Row-major 2x2 complex matrix.
using Matrix2 = std::array<Complex, 4>;

/// Field-free Dirac Hamiltonian at momentum p: [[c^2, cp], [cp, -c^2]].
Matrix2 free_hamiltonian(double p, const Constants& constants) noexcept;

/// sqrt(p^2 c^2 + c^4).
double free_energy(double p, const Constants& constants) noexcept;

/// One momentum/branch eigenstate of the free Hamiltonian. The spinor is the
/// unit eigenvector whose largest-magnitude component is real and positive
/// (ties go to the upper component).
struct FreeMode {
  int k = 0;
  double p = 0.0;
  Branch branch = Branch::positive;
  double energy = 0.0;
  Spinor spinor{};
};

FreeMode make_mode(const GridSpec& grid, const Constants& constants, int k, Branch branch);
/// Mode from an explicit momentum value (k is carried along unchecked).
FreeMode make_mode(double p, int k, const Constants& constants, Branch branch);

/// All 2N modes: the positive branch first, then the negative branch, each in
/// ascending k.
std::vector<FreeMode> free_modes(const GridSpec& grid, const Constants& constants);

/// e^{ipz}/sqrt(L) * spinor sampled on the grid (position representation).
TwoSpinorField mode_wavefunction(const FreeMode& mode, const GridSpec& grid);

/// The same state directly in momentum representation: a single nonzero slot.
TwoSpinorField mode_momentum_state(const FreeMode& mode, const GridSpec& grid);

/// <mode|state> for a momentum-representation state.
Complex project(const FreeMode& mode, const TwoSpinorField& state, const GridSpec& grid);

}  // namespace pairsim
