#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "pairsim/amplitudes.hpp"
#include "pairsim/ces.hpp"
#include "pairsim/config.hpp"

namespace pairsim {

/// Everything derived from one amplitude matrix.
struct Analysis {
  std::vector<double> times;
  std::vector<double> totals;
  /// CES at every sample time.
  std::vector<std::vector<SpectrumPoint>> spectra;
  /// Peaks of the final CES.
  std::vector<Peak> peaks;
  ChannelAssignment channels;
  /// Final-CES peak nearest each channel line within the assignment tolerance.
  std::vector<std::optional<double>> observed_peak;
  /// Mean conversion energy at the final sample, empty when nothing was created.
  std::optional<double> mean_energy;
};

Analysis analyze(const AmplitudeMatrix& u, const RunConfig& config);

/// Writes n_t.csv, ces_final.csv, ces_waterfall.csv, channels.csv,
/// channel_series.csv and peaks.csv into `dir`. Energies are in units of c^2,
/// densities per c^2, times in atomic units; every number carries 17
/// significant digits. Returns the files written.
std::vector<std::filesystem::path> write_analysis(const Analysis& analysis, const RunConfig& config,
                                                  const std::filesystem::path& dir);

struct RunResult {
  AmplitudeMatrix amplitudes;
  Analysis analysis;
  double wall_seconds = 0.0;
};

/// Simulates, analyzes and, when config.output_dir is set, writes every
/// output plus manifest.json (and amplitudes.bin on request). On failure the
/// files written so far are removed before the exception propagates.
RunResult run(const RunConfig& config, std::ostream* log = nullptr);

/// Re-analysis of an amplitude dump with the CES and channel settings of `config`.
Analysis analyze_dump(const std::filesystem::path& dump, const RunConfig& config,
                      const std::filesystem::path& out_dir);

const char* code_version() noexcept;

}  // namespace pairsim
