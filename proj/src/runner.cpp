#include "pairsim/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "pairsim/amplitude_dump.hpp"

#ifndef PAIRSIM_VERSION
#define PAIRSIM_VERSION "unknown"
#endif

namespace pairsim {

namespace fs = std::filesystem;

const char* code_version() noexcept { return PAIRSIM_VERSION; }

namespace {

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class CsvFile {
 public:
  CsvFile(const fs::path& path, const char* header) : path_(path), out_(path, std::ios::trunc) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    out_ << header << '\n';
  }
  std::ofstream& row() { return out_; }
  void close() {
    out_.close();
    if (!out_) throw std::runtime_error("failed writing " + path_.string());
  }

 private:
  fs::path path_;
  std::ofstream out_;
};

// Removes tracked outputs unless released; leaves foreign files alone.
class OutputGuard {
 public:
  explicit OutputGuard(const fs::path& dir) : dir_(dir) {
    if (!fs::exists(dir_)) {
      fs::create_directories(dir_);
      created_dir_ = true;
    }
  }
  ~OutputGuard() {
    if (released_) return;
    std::error_code ec;
    for (const fs::path& f : files_)
      if (fs::is_regular_file(f, ec)) fs::remove(f, ec);
    if (created_dir_ && fs::is_empty(dir_, ec)) fs::remove(dir_, ec);
  }
  void track(const fs::path& f) { files_.push_back(f); }
  std::vector<fs::path>& files() { return files_; }
  void release() { released_ = true; }

 private:
  fs::path dir_;
  std::vector<fs::path> files_;
  bool created_dir_ = false;
  bool released_ = false;
};

}  // namespace

Analysis analyze(const AmplitudeMatrix& u, const RunConfig& config) {
  Analysis a;
  a.times = u.sample_times;
  for (std::size_t s = 0; s < u.samples(); ++s) {
    a.totals.push_back(pair_number(u, s));
    a.spectra.push_back(ces_spectrum(u, s, config.ces));
  }
  if (!a.spectra.empty()) a.peaks = peak_detect(a.spectra.back());
  const std::vector<ChannelSpec> lattice = config.channel_lattice();
  a.channels = channel_yields(u, lattice, config.channels.tolerance);
  for (const ChannelSpec& ch : lattice) {
    std::optional<double> best;
    for (const Peak& p : a.peaks) {
      const double gap = std::abs(p.energy - ch.energy);
      if (gap <= config.channels.tolerance && (!best || gap < std::abs(*best - ch.energy))) best = p.energy;
    }
    a.observed_peak.push_back(best);
  }
  if (!a.totals.empty() && a.totals.back() > 0.0) a.mean_energy = mean_conversion_energy(u, u.samples() - 1);
  return a;
}

namespace {

void write_analysis_into(const Analysis& a, const RunConfig& config, const fs::path& dir,
                         std::vector<fs::path>& written) {
  const double c2 = config.constants.c2();
  auto open = [&](const char* name, const char* header) {
    written.push_back(dir / name);
    return CsvFile(written.back(), header);
  };

  {
    CsvFile f = open("n_t.csv", "t,N");
    for (std::size_t s = 0; s < a.times.size(); ++s) f.row() << num(a.times[s]) << ',' << num(a.totals[s]) << '\n';
    f.close();
  }
  {
    CsvFile f = open("ces_final.csv", "E,rho");
    if (!a.spectra.empty())
      for (const SpectrumPoint& p : a.spectra.back()) f.row() << num(p.energy / c2) << ',' << num(p.density * c2) << '\n';
    f.close();
  }
  {
    CsvFile f = open("ces_waterfall.csv", "t,E,rho");
    for (std::size_t s = 0; s < a.times.size(); ++s) {
      if (a.times[s] <= 0.0) continue;
      for (const SpectrumPoint& p : a.spectra[s])
        f.row() << num(a.times[s]) << ',' << num(p.energy / c2) << ',' << num(p.density * c2) << '\n';
    }
    f.close();
  }
  {
    CsvFile f = open("channels.csv", "label,n1,n2,k,E_pred,E_peak_observed,yield_final,fraction");
    for (std::size_t i = 0; i < a.channels.channels.size(); ++i) {
      const ChannelYield& y = a.channels.channels[i];
      const double observed = a.observed_peak[i] ? *a.observed_peak[i] / c2 : std::nan("");
      f.row() << y.channel.label << ',' << y.channel.n1 << ',' << y.channel.n2 << ',' << y.channel.k << ','
              << num(y.channel.energy / c2) << ',' << num(observed) << ','
              << num(y.yield_at.empty() ? 0.0 : y.yield_at.back()) << ',' << num(y.fraction_of_total) << '\n';
    }
    f.close();
  }
  {
    CsvFile f = open("channel_series.csv", "t,label,yield");
    for (std::size_t s = 0; s < a.times.size(); ++s) {
      for (const ChannelYield& y : a.channels.channels)
        f.row() << num(a.times[s]) << ',' << y.channel.label << ',' << num(y.yield_at[s]) << '\n';
      f.row() << num(a.times[s]) << ",unassigned," << num(a.channels.unassigned[s]) << '\n';
    }
    f.close();
  }
  {
    CsvFile f = open("peaks.csv", "E_peak,height");
    for (const Peak& p : a.peaks) f.row() << num(p.energy / c2) << ',' << num(p.height * c2) << '\n';
    f.close();
  }
}

}  // namespace

std::vector<fs::path> write_analysis(const Analysis& a, const RunConfig& config, const fs::path& dir) {
  std::vector<fs::path> written;
  write_analysis_into(a, config, dir, written);
  return written;
}

RunResult run(const RunConfig& config, std::ostream* log) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  std::optional<OutputGuard> guard;
  if (!config.output_dir.empty()) guard.emplace(config.output_dir);

  if (log && config.scale == "full")
    *log << "warning: full-scale run (N_z=" << config.grid.size() << "), expect a long runtime\n";

  SweepOptions options;
  options.workers = config.workers;
  std::size_t last_percent = 0;
  if (log) {
    options.progress = [&](std::size_t done, std::size_t total) {
      const std::size_t percent = 100 * done / total;
      if (percent >= last_percent + 10 || done == total) {
        last_percent = percent;
        *log << "  evolved " << done << "/" << total << " negative modes\n" << std::flush;
      }
    };
  }

  RunResult result;
  result.amplitudes =
      compute_amplitudes(config.grid, config.constants, config.field, config.schedule, config.selection, options);
  result.analysis = analyze(result.amplitudes, config);
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (guard) {
    const fs::path dir = config.output_dir;
    write_analysis_into(result.analysis, config, dir, guard->files());
    if (config.dump_amplitudes) {
      guard->track(dir / "amplitudes.bin");
      write_amplitude_dump(result.amplitudes, dir / "amplitudes.bin");
    }
    nlohmann::json manifest = {
        {"manifest_version", 1},
        {"code_version", code_version()},
        {"wall_time_seconds", result.wall_seconds},
        {"config", config_to_json(config)},
        {"summary",
         {{"N_final", result.analysis.totals.empty() ? 0.0 : result.analysis.totals.back()},
          {"mean_conversion_energy_c2",
           result.analysis.mean_energy ? nlohmann::json(*result.analysis.mean_energy / config.constants.c2())
                                       : nlohmann::json(nullptr)},
          {"positive_modes", result.amplitudes.positive.size()},
          {"negative_modes", result.amplitudes.negative.size()}}},
    };
    const fs::path manifest_path = dir / "manifest.json";
    guard->track(manifest_path);
    std::ofstream out(manifest_path, std::ios::trunc);
    out << manifest.dump(2) << '\n';
    out.close();
    if (!out) throw std::runtime_error("failed writing " + manifest_path.string());
    guard->release();
  }
  return result;
}

Analysis analyze_dump(const fs::path& dump, const RunConfig& config, const fs::path& out_dir) {
  const AmplitudeMatrix u = read_amplitude_dump(dump, config.constants);
  Analysis a = analyze(u, config);
  if (!out_dir.empty()) {
    OutputGuard guard(out_dir);
    write_analysis_into(a, config, out_dir, guard.files());
    guard.release();
  }
  return a;
}

}  // namespace pairsim
