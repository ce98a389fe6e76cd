#include "pairsim/amplitudes.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

namespace pairsim {

std::vector<FreeMode> select_modes(const GridSpec& grid, const Constants& constants, Branch branch,
                                   std::optional<double> cutoff) {
  if (cutoff) {
    if (!(*cutoff >= 0.0)) throw std::invalid_argument("mode cutoff must be >= 0");
    if (*cutoff > grid.max_momentum() * (1.0 + 1e-12))
      throw std::invalid_argument("mode cutoff " + std::to_string(*cutoff) + " exceeds the grid's largest momentum " +
                                  std::to_string(grid.max_momentum()));
  }
  std::vector<FreeMode> modes;
  for (int k = grid.min_index(); k <= grid.max_index(); ++k) {
    if (cutoff && std::abs(grid.momentum(k)) > *cutoff * (1.0 + 1e-12)) continue;
    modes.push_back(make_mode(grid, constants, k, branch));
  }
  if (modes.empty()) throw std::invalid_argument("mode selection is empty");
  return modes;
}

std::size_t AmplitudeMatrix::sample_index(double t) const {
  for (std::size_t i = 0; i < sample_times.size(); ++i) {
    const double scale = std::max(std::abs(sample_times[i]), std::abs(t));
    if (std::abs(sample_times[i] - t) <= 1e-12 * scale) return i;
  }
  throw std::out_of_range("time " + std::to_string(t) + " is not a sample time");
}

std::size_t sweep_bytes(const GridSpec& grid, const FieldConfig& config, const Schedule& schedule,
                        std::size_t positive_count, std::size_t negative_count) {
  return schedule.sample_steps.size() * positive_count * negative_count * sizeof(Complex) +
         potential_phase_bytes(config, grid, schedule);
}

AmplitudeMatrix compute_amplitudes(const GridSpec& grid, const Constants& constants, const FieldConfig& config,
                                   const Schedule& schedule, const ModeSelection& selection,
                                   const SweepOptions& options) {
  config.validate();
  schedule.validate();
  AmplitudeMatrix u;
  u.c = constants.c();
  u.sample_times = schedule.sample_times();
  u.positive = select_modes(grid, constants, Branch::positive, selection.positive_cutoff);
  u.negative = select_modes(grid, constants, Branch::negative, selection.negative_cutoff);
  u.dt = schedule.dt();

  const std::size_t np = u.positive.size();
  const std::size_t nn = u.negative.size();
  const std::size_t ns = u.samples();
  const std::size_t bytes = sweep_bytes(grid, config, schedule, np, nn);
  const std::string sizes = "N_t=" + std::to_string(ns) + " samples, N_p=" + std::to_string(np) +
                            ", N_n=" + std::to_string(nn) + ", N_z=" + std::to_string(grid.size()) +
                            ", steps=" + std::to_string(schedule.steps);
  if (bytes > options.memory_limit)
    throw ResourceError("amplitude sweep needs " + std::to_string(bytes >> 20) + " MiB (" + sizes +
                        "), limit is " + std::to_string(options.memory_limit >> 20) + " MiB");

  std::unique_ptr<Propagator> propagator;
  try {
    u.entries.assign(ns * np * nn, Complex{});
    propagator = std::make_unique<Propagator>(grid, constants, config, schedule);
  } catch (const std::bad_alloc&) {
    throw ResourceError("out of memory allocating amplitude sweep (" + sizes + ")");
  }

  std::vector<std::size_t> slots(np);
  std::vector<Spinor> conj_spinors(np);
  for (std::size_t p = 0; p < np; ++p) {
    slots[p] = grid.slot_of_index(u.positive[p].k);
    conj_spinors[p] = {std::conj(u.positive[p].spinor[0]), std::conj(u.positive[p].spinor[1])};
  }

  std::atomic<std::size_t> next{0};
  std::size_t done = 0;
  std::mutex progress_mutex;
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    try {
      for (std::size_t n = next++; n < nn; n = next++) {
        propagator->run(mode_momentum_state(u.negative[n], grid), [&](std::size_t s, const TwoSpinorField& state) {
          const auto up = state.upper();
          const auto lo = state.lower();
          Complex* out = u.entries.data() + s * np * nn + n;
          for (std::size_t p = 0; p < np; ++p) {
            const std::size_t m = slots[p];
            out[p * nn] = conj_spinors[p][0] * up[m] + conj_spinors[p][1] * lo[m];
          }
        });
        if (options.progress) {
          std::lock_guard lock(progress_mutex);
          options.progress(++done, nn);
        }
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = nn;
    }
  };

  const unsigned count = std::max(1u, std::min<unsigned>(options.workers, static_cast<unsigned>(nn)));
  if (count == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(count);
    for (unsigned i = 0; i < count; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return u;
}

double pair_number(const AmplitudeMatrix& u, std::size_t sample) {
  if (sample >= u.samples()) throw std::out_of_range("sample index " + std::to_string(sample) + " out of range");
  CompensatedSum total;
  for (const Complex& a : u.slice(sample)) total += std::norm(a);
  return total.value();
}

double pair_number_at(const AmplitudeMatrix& u, double t) { return pair_number(u, u.sample_index(t)); }

std::vector<double> spatial_density(const AmplitudeMatrix& u, const GridSpec& grid, std::size_t sample) {
  if (sample >= u.samples()) throw std::out_of_range("sample index " + std::to_string(sample) + " out of range");
  const auto fft = FourierTransform::shared(grid);
  std::vector<std::size_t> slots(u.positive.size());
  for (std::size_t p = 0; p < u.positive.size(); ++p)
    slots[p] = grid.slot_of_index(grid.index_of_momentum(u.positive[p].p));
  std::vector<CompensatedSum> acc(grid.size());
  TwoSpinorField electron(grid, Representation::momentum);
  for (std::size_t n = 0; n < u.negative.size(); ++n) {
    electron.set_representation(Representation::momentum);
    std::fill(electron.data().begin(), electron.data().end(), Complex{});
    auto up = electron.upper();
    auto lo = electron.lower();
    for (std::size_t p = 0; p < u.positive.size(); ++p) {
      const Complex a = u.at(sample, p, n);
      up[slots[p]] += a * u.positive[p].spinor[0];
      lo[slots[p]] += a * u.positive[p].spinor[1];
    }
    fft->to_position(electron);
    const auto pu = electron.upper();
    const auto pl = electron.lower();
    for (std::size_t j = 0; j < grid.size(); ++j) acc[j] += std::norm(pu[j]) + std::norm(pl[j]);
  }
  std::vector<double> rho(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) rho[j] = acc[j].value();
  return rho;
}

}  // namespace pairsim
