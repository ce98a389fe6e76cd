// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.
//
//   acceptance [--full] [--workers N] [--only C1,C3,...]
//
// Desk-scale runs are shared between criteria. --full adds the N_z = 4096
// yield checks (each simulation takes several minutes per core).

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "oracle/dense_propagator.hpp"
#include "oracle/toy_field.hpp"
#include "pairsim/amplitudes.hpp"
#include "pairsim/ces.hpp"
#include "pairsim/presets.hpp"
#include "pairsim/propagator.hpp"
#include "pairsim/runner.hpp"

using namespace pairsim;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  // Records one sub-check; the detail line shows every measured value.
  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    if (detail.tellp() > 0) detail << "; ";
    detail << what << (ok ? "" : " [x]");
  }
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

class Runs {
 public:
  Runs(unsigned workers) : workers_(workers) {}

  const RunResult& get(const std::string& key, const std::function<RunConfig()>& make) {
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    RunConfig config = make();
    config.workers = workers_;
    std::cerr << "  simulating " << key << " (N_z=" << config.grid.size() << ") ..." << std::flush;
    RunResult r = run(config);
    std::cerr << " " << fmt("%.0f", r.wall_seconds) << " s\n";
    configs_.emplace(key, config);
    return cache_.emplace(key, std::move(r)).first->second;
  }
  const RunResult& preset(const std::string& name, Scale scale = Scale::desk) {
    return get(name + (scale == Scale::full ? "@full" : "@desk"), [&] { return preset_config(name, scale); });
  }
  const RunConfig& config(const std::string& key) const { return configs_.at(key); }

 private:
  unsigned workers_;
  std::map<std::string, RunResult> cache_;
  std::map<std::string, RunConfig> configs_;
};

double c2_of(const RunResult& r) { return r.amplitudes.constants().c2(); }

const ChannelYield* channel(const RunResult& r, int n1, int n2, int k) {
  for (const ChannelYield& y : r.analysis.channels.channels)
    if (y.channel.n1 == n1 && y.channel.n2 == n2 && y.channel.k == k) return &y;
  return nullptr;
}

std::optional<Peak> nearest_peak(const RunResult& r, double energy_c2) {
  const double c2 = c2_of(r);
  std::optional<Peak> best;
  for (const Peak& p : r.analysis.peaks)
    if (!best || std::abs(p.energy - energy_c2 * c2) < std::abs(best->energy - energy_c2 * c2)) best = p;
  return best;
}

Peak dominant_peak(const RunResult& r) {
  Peak best;
  for (const Peak& p : r.analysis.peaks)
    if (p.height > best.height) best = p;
  return best;
}

// Desk osc-1.3 with the second frequency of the two-color preset.
RunConfig osc_15_desk() {
  RunConfig r = preset_config("osc-1.3", Scale::desk);
  r.field.terms[0].frequency = 1.5 * r.constants.c2();
  r.preset = "osc-1.5";
  r.validate();
  return r;
}

void criterion_peaks(Runs& runs, Verdict& v) {
  const RunResult& r = runs.preset("osc-1.3");
  const double c2 = c2_of(r);
  for (double target : {2.61, 3.90, 5.21, 6.50}) {
    const auto p = nearest_peak(r, target);
    const double e = p ? p->energy / c2 : std::nan("");
    v.check(p && std::abs(e - target) <= 0.06, fmt("%.2f", target) + "->" + fmt("%.4f", e));
  }
}

void criterion_fractions(Runs& runs, Verdict& v) {
  const RunResult& r = runs.preset("osc-1.3");
  double previous = 2.0;
  bool decreasing = true;
  std::string list;
  for (int n = 2; n <= 5; ++n) {
    const ChannelYield* y = channel(r, n, 0, 0);
    const double f = y ? y->fraction_of_total : std::nan("");
    decreasing = decreasing && f < previous;
    previous = f;
    list += (n > 2 ? "/" : "") + fmt("%.2f", 100.0 * f);
  }
  v.check(decreasing, "2w1..5w1 % " + list + " strictly decreasing");
  const double f2 = 100.0 * channel(r, 2, 0, 0)->fraction_of_total;
  const double f3 = 100.0 * channel(r, 3, 0, 0)->fraction_of_total;
  v.check(std::abs(f2 - 60.9) <= 8.0, "2w1 " + fmt("%.2f", f2) + "% vs 60.9+-8");
  v.check(std::abs(f3 - 29.6) <= 8.0, "3w1 " + fmt("%.2f", f3) + "% vs 29.6+-8");
}

void criterion_static(Runs& runs, Verdict& v) {
  const std::pair<const char*, double> cases[] = {{"static-2.5", 2.5}, {"static-3.0", 2.94}, {"static-3.5", 3.44}};
  for (const auto& [name, target] : cases) {
    const RunResult& r = runs.preset(name);
    const double e = dominant_peak(r).energy / c2_of(r);
    v.check(std::abs(e - target) <= 0.1, std::string(name) + " dominant " + fmt("%.4f", e) + " vs " +
                                             fmt("%.2f", target) + "+-0.1");
  }
  const RunResult& r = runs.preset("static-2.5");
  const double mean = r.analysis.mean_energy.value_or(std::nan("")) / c2_of(r);
  v.check(std::abs(mean - 2.58) <= 0.13, "static-2.5 mean " + fmt("%.4f", mean) + " vs 2.58+-0.13");
}

void criterion_two_color(Runs& runs, Verdict& v) {
  const RunResult& bi = runs.preset("bifreq-1.3-1.5");
  const std::tuple<int, int, const char*> lines[] = {{1, 1, "w1+w2"}, {2, 1, "2w1+w2"}, {1, 2, "w1+2w2"}};
  for (const auto& [n1, n2, label] : lines) {
    const ChannelYield* y = channel(bi, n1, n2, 0);
    const double f = y ? 100.0 * y->fraction_of_total : 0.0;
    v.check(f > 1.0, std::string(label) + " " + fmt("%.2f", f) + "%");
  }
  const double c2 = c2_of(bi);
  const double tol = runs.config("bifreq-1.3-1.5@desk").channels.tolerance / c2;
  const auto p = nearest_peak(bi, 2.4);
  const double e = p ? p->energy / c2 : std::nan("");
  v.check(p && std::abs(e - 2.4) <= tol, "3w1-w2 peak " + fmt("%.4f", e) + " vs 2.4+-" + fmt("%.2f", tol));

  const double n_bi = bi.analysis.totals.back();
  const double n13 = runs.preset("osc-1.3").analysis.totals.back();
  const double n15 = runs.get("osc-1.5@desk", osc_15_desk).analysis.totals.back();
  v.check(n_bi > n13 + n15, "N " + fmt("%.4f", n_bi) + " > " + fmt("%.4f", n13) + " + " + fmt("%.4f", n15));
}

void criterion_assisted(Runs& runs, Verdict& v) {
  const RunResult& r = runs.preset("combined-1.0-1.3");
  for (int n = 1; n <= 3; ++n) {
    const ChannelYield* y = channel(r, n, 0, 1);
    const double f = y ? 100.0 * y->fraction_of_total : 0.0;
    v.check(f > 1.0, (y ? y->channel.label : std::to_string(n) + "w1+V0") + " " + fmt("%.2f", f) + "%");
  }
  const double n_comb = r.analysis.totals.back();
  const double n_osc = runs.preset("osc-1.3").analysis.totals.back();
  v.check(n_comb > n_osc, "N " + fmt("%.4f", n_comb) + " > osc " + fmt("%.4f", n_osc));
}

void criterion_oracle(Verdict& v) {
  double worst_gap = 0.0, lo_ratio = 1e9, hi_ratio = 0.0;
  for (unsigned seed = 1; seed <= 8; ++seed) {
    const oracle::Toy toy = oracle::random_toy(seed);
    double gaps[2];
    for (int i = 0; i < 2; ++i) {
      const std::size_t steps = i == 0 ? 64 : 128;
      const Schedule sched = Schedule::uniform(toy.t_total, steps, 1);
      const AmplitudeMatrix u = compute_amplitudes(toy.grid, toy.constants, toy.field, sched, {});
      const oracle::Matrix ref = oracle::amplitudes(
          oracle::time_ordered(toy.grid, toy.constants, toy.field, toy.t_total, steps), u.positive, u.negative,
          toy.grid);
      double gap = 0.0;
      for (std::size_t p = 0; p < u.positive.size(); ++p)
        for (std::size_t n = 0; n < u.negative.size(); ++n)
          gap = std::max(gap, std::abs(u.at(1, p, n) - ref(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(n))));
      gaps[i] = gap;
    }
    worst_gap = std::max(worst_gap, gaps[0]);
    lo_ratio = std::min(lo_ratio, gaps[0] / gaps[1]);
    hi_ratio = std::max(hi_ratio, gaps[0] / gaps[1]);
  }
  v.check(worst_gap <= 1e-4, "8 random fields, max gap " + fmt("%.3e", worst_gap) + " <= 1e-4");
  v.check(lo_ratio >= 3.3 && hi_ratio <= 4.7,
          "dt-halving ratio in [" + fmt("%.3f", lo_ratio) + ", " + fmt("%.3f", hi_ratio) + "]");
}

void criterion_conservation(Runs& runs, Verdict& v) {
  const Constants k;
  const double c = k.c(), c2 = k.c2();
  const WellShape shape{0.3 / c, 8.0 / c};
  const Schedule reference_schedule = Schedule::uniform(40.0 * std::numbers::pi / c2, 4000, 50);

  {
    const GridSpec g(2.5, 256);
    const AmplitudeMatrix u = compute_amplitudes(g, k, FieldConfig{shape, {}}, reference_schedule, {});
    double worst = 0.0;
    for (std::size_t t = 0; t < u.samples(); ++t) worst = std::max(worst, pair_number(u, t));
    v.check(worst <= 1e-12, "free N max " + fmt("%.2e", worst));
  }
  {
    const GridSpec g(2.5, 256);
    const FieldConfig bi{shape, {TimeTerm::sine(1.47 * c2, 1.3 * c2), TimeTerm::sine(1.47 * c2, 1.5 * c2)}};
    const Propagator prop(g, k, bi, reference_schedule);
    double worst = 0.0;
    for (int idx = g.min_index(); idx <= g.max_index(); idx += 17)
      prop.run(mode_momentum_state(make_mode(g, k, idx, Branch::negative), g),
               [&](std::size_t, const TwoSpinorField& s) { worst = std::max(worst, std::abs(s.squared_norm() - 1.0)); });
    v.check(worst <= 1e-9, "norm drift " + fmt("%.2e", worst));
  }
  {
    double worst = 0.0;
    for (const char* name : {"osc-1.3", "bifreq-1.3-1.5", "combined-1.0-1.3"}) {
      const RunResult& r = runs.preset(name);
      const ChannelAssignment& a = r.analysis.channels;
      for (std::size_t t = 0; t < r.analysis.totals.size(); ++t) {
        CompensatedSum sum;
        for (const ChannelYield& y : a.channels) sum += y.yield_at[t];
        sum += a.unassigned[t];
        worst = std::max(worst, std::abs(sum.value() - r.analysis.totals[t]));
      }
    }
    v.check(worst <= 1e-10, "channel sums - N " + fmt("%.2e", worst));
  }
  {
    const GridSpec g(2.5, 64);
    const FieldConfig osc{shape, {TimeTerm::sine(1.47 * c2, 1.3 * c2)}};
    const Schedule sched = Schedule::uniform(40.0 * std::numbers::pi / c2, 4000, 10);
    const AmplitudeMatrix u = compute_amplitudes(g, k, osc, sched, {});
    const auto negatives = select_modes(g, k, Branch::negative, std::nullopt);
    double worst = 0.0;
    for (std::size_t n = 0; n < negatives.size(); ++n) {
      const auto snaps = evolve(negatives[n], sched, osc, g, k);
      for (std::size_t t = 0; t < u.samples(); ++t) {
        const TwoSpinorField mom = transform(snaps[t], Direction::to_momentum);
        CompensatedSum sum;
        for (std::size_t p = 0; p < u.positive.size(); ++p) sum += std::norm(u.at(t, p, n));
        for (const FreeMode& other : negatives) sum += std::norm(project(other, mom, g));
        worst = std::max(worst, std::abs(sum.value() - 1.0));
      }
    }
    v.check(worst <= 1e-9, "unitarity partition " + fmt("%.2e", worst));
  }
}

void criterion_waterfall(Runs& runs, Verdict& v) {
  const RunResult& r = runs.preset("osc-1.3");
  const double c2 = c2_of(r);
  const double tol = runs.config("osc-1.3@desk").channels.tolerance;
  const auto& spectra = r.analysis.spectra;  // index 0 is t = 0
  std::size_t lo_idx = SIZE_MAX, hi_idx = 0;
  double previous = -1.0;
  std::size_t drops = 0;
  for (std::size_t s = 10; s < spectra.size(); ++s) {
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < spectra[s].size(); ++i)
      if (std::abs(spectra[s][i].energy - 2.6 * c2) <= tol && spectra[s][i].density > best) {
        best = spectra[s][i].density;
        arg = i;
      }
    lo_idx = std::min(lo_idx, arg);
    hi_idx = std::max(hi_idx, arg);
    if (best < previous) ++drops;
    previous = best;
  }
  const double step = runs.config("osc-1.3@desk").ces.step() / c2;
  v.check(hi_idx - lo_idx <= 1, "2w1 argmax index spread " + std::to_string(hi_idx - lo_idx) + " (E " +
                                    fmt("%.4f", spectra.back()[lo_idx].energy / c2) + ".." +
                                    fmt("%.4f", spectra.back()[hi_idx].energy / c2) + ", step " + fmt("%.4f", step) +
                                    ")");
  v.check(drops == 0, "height decreases over samples 10..50: " + std::to_string(drops));
}

void criterion_saturation(Runs& runs, Verdict& v) {
  const RunResult& r = runs.preset("osc-2.1");
  const auto increments = [&](int n) {
    const std::vector<double>& y = channel(r, n, 0, 0)->yield_at;  // 51 samples, 50 intervals
    const std::size_t last = y.size() - 1;
    return std::pair{y[5] - y[0], y[last] - y[last - 5]};
  };
  const auto [one_first, one_last] = increments(1);
  const double drop = 1.0 - one_last / one_first;
  v.check(drop >= 0.30, "1w1 increment first5 " + fmt("%.4f", one_first) + " -> last5 " + fmt("%.4f", one_last) +
                            " (decrease " + fmt("%.1f", 100.0 * drop) + "%)");
  const auto [two_first, two_last] = increments(2);
  const double ratio = two_last / two_first;
  v.check(std::abs(ratio - 1.0) <= 0.20, "2w1 increment first5 " + fmt("%.4f", two_first) + " -> last5 " +
                                             fmt("%.4f", two_last) + " (ratio " + fmt("%.3f", ratio) + ")");
}

void criterion_full_yield(Runs& runs, Verdict& v, const char* name, double target) {
  const RunResult& r = runs.preset(name, Scale::full);
  const double n = r.analysis.totals.back();
  v.check(std::abs(n - target) <= 0.1 * target, std::string(name) + " N " + fmt("%.4f", n) + " vs " +
                                                    fmt("%.2f", target) + "+-10%");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance gate"};
  bool full = false;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  std::string only;
  app.add_flag("--full", full, "include the full-scale yield checks");
  app.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--only", only, "comma-separated criterion ids");
  CLI11_PARSE(app, argc, argv);

  std::set<std::string> selected;
  for (std::stringstream s(only); s.good();) {
    std::string id;
    std::getline(s, id, ',');
    if (!id.empty()) selected.insert(id);
  }

  Runs runs(workers);
  struct Criterion {
    std::string id, title;
    std::function<void(Verdict&)> body;
    bool full_only = false;
  };
  const std::vector<Criterion> criteria = {
      {"C1", "multiphoton peak positions (osc-1.3 desk)", [&](Verdict& v) { criterion_peaks(runs, v); }},
      {"C2", "channel-yield ordering and magnitudes (osc-1.3 desk)", [&](Verdict& v) { criterion_fractions(runs, v); }},
      {"C2-full", "total yield osc-1.3 full scale",
       [&](Verdict& v) { criterion_full_yield(runs, v, "osc-1.3", 1.73); }, true},
      {"C3", "static tunneling signature (static-2.5/3.0/3.5 desk)", [&](Verdict& v) { criterion_static(runs, v); }},
      {"C4", "two-color cooperation (bifreq-1.3-1.5 desk)", [&](Verdict& v) { criterion_two_color(runs, v); }},
      {"C4-full", "total yield bifreq-1.3-1.5 full scale",
       [&](Verdict& v) { criterion_full_yield(runs, v, "bifreq-1.3-1.5", 7.04); }, true},
      {"C5", "dynamically assisted channels (combined-1.0-1.3 desk)", [&](Verdict& v) { criterion_assisted(runs, v); }},
      {"C5-full", "total yield combined-1.0-1.3 full scale",
       [&](Verdict& v) { criterion_full_yield(runs, v, "combined-1.0-1.3", 2.63); }, true},
      {"C6", "propagator oracle equivalence (N_z=32, N_t=64)", [&](Verdict& v) { criterion_oracle(v); }},
      {"C7", "conservation and unitarity", [&](Verdict& v) { criterion_conservation(runs, v); }},
      {"C8", "waterfall stability (osc-1.3 desk)", [&](Verdict& v) { criterion_waterfall(runs, v); }},
      {"C9", "one-photon saturation (osc-2.1 desk)", [&](Verdict& v) { criterion_saturation(runs, v); }},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    if (!selected.empty() && !selected.contains(c.id)) continue;
    if (c.full_only && !full) {
      std::cout << "SKIP " << c.id << " " << c.title << " | needs --full\n" << std::flush;
      continue;
    }
    Verdict v;
    try {
      c.body(v);
    } catch (const std::exception& e) {
      v.check(false, std::string("error: ") + e.what());
    }
    failures += v.pass ? 0 : 1;
    std::cout << (v.pass ? "PASS " : "FAIL ") << c.id << " " << c.title << " | " << v.detail.str() << '\n'
              << std::flush;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << '\n';
  return failures == 0 ? 0 : 1;
}
