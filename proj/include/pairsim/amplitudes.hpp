#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "pairsim/fields.hpp"
#include "pairsim/free_modes.hpp"
#include "pairsim/grid.hpp"
#include "pairsim/propagator.hpp"

namespace pairsim {

/// Momentum cutoffs (a.u., inclusive) for the initial negative modes and the
/// positive projection targets. std::nullopt selects the whole grid.
struct ModeSelection {
  std::optional<double> negative_cutoff;
  std::optional<double> positive_cutoff;
};

/// Modes of one branch with |p| <= cutoff, ascending k. Throws when the cutoff
/// exceeds the grid's largest momentum or the selection would be empty.
std::vector<FreeMode> select_modes(const GridSpec& grid, const Constants& constants, Branch branch,
                                   std::optional<double> cutoff);

/// Thrown when a sweep would not fit in memory.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// U[t_k][p][n] = <p|U(t_k)|n> between selected positive and negative modes.
struct AmplitudeMatrix {
  double c = kDefaultSpeedOfLight;
  std::vector<double> sample_times;
  std::vector<FreeMode> positive;
  std::vector<FreeMode> negative;
  /// t-major, then p, then n.
  std::vector<Complex> entries;
  double dt = 0.0;

  std::size_t samples() const noexcept { return sample_times.size(); }
  std::size_t slice_size() const noexcept { return positive.size() * negative.size(); }
  const Complex& at(std::size_t t, std::size_t p, std::size_t n) const noexcept {
    return entries[(t * positive.size() + p) * negative.size() + n];
  }
  std::span<const Complex> slice(std::size_t t) const noexcept {
    return {entries.data() + t * slice_size(), slice_size()};
  }
  /// Index of an exact sample time (relative tolerance 1e-12); throws
  /// std::out_of_range for times that were not sampled.
  std::size_t sample_index(double t) const;
  Constants constants() const { return Constants(c); }
};

struct SweepOptions {
  unsigned workers = 1;
  /// Refuse to start when the sweep needs more than this many bytes.
  std::size_t memory_limit = std::size_t{48} << 30;
  /// Called from the worker threads after each finished mode (serialized).
  std::function<void(std::size_t done, std::size_t total)> progress;
};

/// Bytes needed for the amplitude entries plus the shared propagation tables.
std::size_t sweep_bytes(const GridSpec& grid, const FieldConfig& config, const Schedule& schedule,
                        std::size_t positive_count, std::size_t negative_count);

/// Evolves every selected negative mode and projects each snapshot onto the
/// selected positive modes. Each mode writes only its own column, so the
/// result is bit-identical for any worker count.
AmplitudeMatrix compute_amplitudes(const GridSpec& grid, const Constants& constants, const FieldConfig& config,
                                   const Schedule& schedule, const ModeSelection& selection,
                                   const SweepOptions& options = {});

/// N(t_k) = sum_{p,n} |U_{p,n}(t_k)|^2, summed in ascending (p, n) order.
double pair_number(const AmplitudeMatrix& u, std::size_t sample);
double pair_number_at(const AmplitudeMatrix& u, double t);

/// rho(z_j, t_k) = sum_n |sum_p U_{p,n}(t_k) W_p(z_j)|^2; integrates to N(t_k).
std::vector<double> spatial_density(const AmplitudeMatrix& u, const GridSpec& grid, std::size_t sample);

}  // namespace pairsim
