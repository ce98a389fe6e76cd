#include "pairsim/ces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

namespace pairsim {

void CesSpec::validate(const Constants& constants) const {
  const double threshold = 2.0 * constants.c2();
  if (!(e_min >= threshold * (1.0 - 1e-12)))
    throw std::invalid_argument("CES lower bound must be at least 2c^2");
  if (!(e_max > e_min)) throw std::invalid_argument("CES upper bound must exceed the lower bound");
  if (points < 2) throw std::invalid_argument("CES needs at least 2 abscissa points");
  if (!(window > 0.0) || !std::isfinite(window)) throw std::invalid_argument("CES window must be positive");
}

double conversion_energy(const FreeMode& positive, const FreeMode& negative) {
  if (positive.branch != Branch::positive || negative.branch != Branch::negative)
    throw std::invalid_argument("conversion_energy: expects a positive-branch and a negative-branch mode");
  return positive.energy - negative.energy;
}

std::vector<double> pair_energies(const AmplitudeMatrix& u) {
  std::vector<double> e(u.slice_size());
  std::size_t i = 0;
  for (const FreeMode& p : u.positive)
    for (const FreeMode& n : u.negative) e[i++] = conversion_energy(p, n);
  return e;
}

std::vector<SpectrumPoint> ces_spectrum(const AmplitudeMatrix& u, std::size_t sample, const CesSpec& spec) {
  spec.validate(u.constants());
  if (sample >= u.samples()) throw std::out_of_range("ces_spectrum: sample index out of range");
  const std::vector<double> energies = pair_energies(u);
  const auto weights = u.slice(sample);
  const double half = 0.5 * spec.window;
  const double step = spec.step();
  const auto last = static_cast<long>(spec.points) - 1;
  std::vector<CompensatedSum> bins(spec.points);
  auto inside = [&](double e, long i) { return std::abs(e - spec.energy(static_cast<std::size_t>(i))) <= half; };
  for (std::size_t idx = 0; idx < energies.size(); ++idx) {
    const double w = std::norm(weights[idx]);
    if (w == 0.0) continue;
    const double e = energies[idx];
    long lo = static_cast<long>(std::ceil((e - half - spec.e_min) / step));
    long hi = static_cast<long>(std::floor((e + half - spec.e_min) / step));
    lo = std::max(lo, 0L);
    hi = std::min(hi, last);
    if (lo > hi + 1) continue;
    // Guard the rounded bounds against the exact inclusive test.
    while (lo > 0 && inside(e, lo - 1)) --lo;
    while (lo <= hi && !inside(e, lo)) ++lo;
    while (hi < last && inside(e, hi + 1)) ++hi;
    while (hi >= lo && !inside(e, hi)) --hi;
    for (long i = lo; i <= hi; ++i) bins[static_cast<std::size_t>(i)] += w;
  }
  std::vector<SpectrumPoint> out(spec.points);
  for (std::size_t i = 0; i < spec.points; ++i) out[i] = {spec.energy(i), bins[i].value() / spec.window};
  return out;
}

double mean_conversion_energy(const AmplitudeMatrix& u, std::size_t sample) {
  if (sample >= u.samples()) throw std::out_of_range("mean_conversion_energy: sample index out of range");
  const std::vector<double> energies = pair_energies(u);
  const auto weights = u.slice(sample);
  CompensatedSum total, moment;
  for (std::size_t i = 0; i < energies.size(); ++i) {
    const double w = std::norm(weights[i]);
    total += w;
    moment += w * energies[i];
  }
  if (!(total.value() > 0.0)) throw std::domain_error("mean_conversion_energy: total yield is zero");
  return moment.value() / total.value();
}

std::string channel_label(int n1, int n2, int k) {
  auto term = [](int n, const char* name) {
    const int a = std::abs(n);
    return (a == 1 ? std::string() : std::to_string(a)) + name;
  };
  std::string out;
  const std::pair<int, const char*> photons[] = {{n1, "w1"}, {n2, "w2"}};
  for (const auto& [n, name] : photons)
    if (n > 0) out += (out.empty() ? "" : "+") + term(n, name);
  for (const auto& [n, name] : photons)
    if (n < 0) out += "-" + term(n, name);
  if (k != 0) out += (out.empty() ? "" : "+") + std::string(k == 1 ? "" : std::to_string(k)) + "V0";
  return out;
}

std::vector<ChannelSpec> channel_lattice(std::span<const double> frequencies, double v0, double lo, double hi,
                                         int order_max, bool allow_emission) {
  if (frequencies.size() > 2) throw std::invalid_argument("channel_lattice: at most two frequencies");
  for (double w : frequencies)
    if (!(w > 0.0)) throw std::invalid_argument("channel_lattice: frequencies must be positive");
  if (order_max < 1) throw std::invalid_argument("channel_lattice: order_max must be >= 1");

  const int min_count = allow_emission ? -order_max : 0;
  const int n1_lo = frequencies.size() >= 1 ? min_count : 0;
  const int n1_hi = frequencies.size() >= 1 ? order_max : 0;
  const int n2_lo = frequencies.size() == 2 ? min_count : 0;
  const int n2_hi = frequencies.size() == 2 ? order_max : 0;
  const int k_hi = v0 > 0.0 ? 1 : 0;
  const double w1 = frequencies.size() >= 1 ? frequencies[0] : 0.0;
  const double w2 = frequencies.size() == 2 ? frequencies[1] : 0.0;

  std::vector<ChannelSpec> all;
  for (int n1 = n1_lo; n1 <= n1_hi; ++n1)
    for (int n2 = n2_lo; n2 <= n2_hi; ++n2)
      for (int k = 0; k <= k_hi; ++k) {
        if (n1 == 0 && n2 == 0 && k == 0) continue;
        if (std::abs(n1) + std::abs(n2) > order_max) continue;
        const double e = n1 * w1 + n2 * w2 + k * v0;
        if (e < lo || e > hi) continue;
        all.push_back({n1, n2, k, e, channel_label(n1, n2, k)});
      }
  auto order = [](const ChannelSpec& c) { return std::abs(c.n1) + std::abs(c.n2) + c.k; };
  std::sort(all.begin(), all.end(), [&](const ChannelSpec& a, const ChannelSpec& b) {
    return std::tuple(a.energy, order(a), -a.n1, -a.n2) < std::tuple(b.energy, order(b), -b.n1, -b.n2);
  });
  std::vector<ChannelSpec> out;
  for (const ChannelSpec& c : all) {
    // Among near-equal energies keep the lowest order, wherever it sorted.
    if (!out.empty() && std::abs(c.energy - out.back().energy) <= 1e-9 * std::max(1.0, std::abs(c.energy))) {
      if (order(c) < order(out.back())) out.back() = c;
      continue;
    }
    out.push_back(c);
  }
  return out;
}

ChannelAssignment channel_yields(const AmplitudeMatrix& u, std::span<const ChannelSpec> channels, double tolerance) {
  if (!(tolerance > 0.0)) throw std::invalid_argument("channel_yields: tolerance must be positive");
  for (std::size_t i = 1; i < channels.size(); ++i) {
    if (channels[i].energy < channels[i - 1].energy)
      throw std::invalid_argument("channel_yields: channels must be sorted by energy");
    const double spacing = channels[i].energy - channels[i - 1].energy;
    if (tolerance > 0.5 * spacing * (1.0 + 1e-9))
      throw std::invalid_argument("channel_yields: tolerance overlaps channels " + channels[i - 1].label + " and " +
                                  channels[i].label);
  }
  const std::vector<double> energies = pair_energies(u);
  constexpr std::size_t kUnassigned = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> owner(energies.size(), kUnassigned);
  for (std::size_t idx = 0; idx < energies.size(); ++idx) {
    const double e = energies[idx];
    const auto it = std::lower_bound(channels.begin(), channels.end(), e,
                                     [](const ChannelSpec& c, double x) { return c.energy < x; });
    std::size_t best = kUnassigned;
    double best_gap = tolerance;
    if (it != channels.begin()) {
      const auto j = static_cast<std::size_t>(std::prev(it) - channels.begin());
      const double gap = std::abs(e - channels[j].energy);
      if (gap <= best_gap) {
        best = j;
        best_gap = gap;
      }
    }
    if (it != channels.end()) {
      const auto j = static_cast<std::size_t>(it - channels.begin());
      const double gap = std::abs(e - channels[j].energy);
      if (gap <= tolerance && (best == kUnassigned || gap < best_gap)) best = j;
    }
    owner[idx] = best;
  }

  ChannelAssignment out;
  out.channels.resize(channels.size());
  for (std::size_t c = 0; c < channels.size(); ++c) {
    out.channels[c].channel = channels[c];
    out.channels[c].yield_at.resize(u.samples());
  }
  out.unassigned.resize(u.samples());
  out.total.resize(u.samples());
  for (std::size_t s = 0; s < u.samples(); ++s) {
    std::vector<CompensatedSum> acc(channels.size());
    CompensatedSum rest, total;
    const auto weights = u.slice(s);
    for (std::size_t idx = 0; idx < energies.size(); ++idx) {
      const double w = std::norm(weights[idx]);
      total += w;
      if (owner[idx] == kUnassigned)
        rest += w;
      else
        acc[owner[idx]] += w;
    }
    for (std::size_t c = 0; c < channels.size(); ++c) out.channels[c].yield_at[s] = acc[c].value();
    out.unassigned[s] = rest.value();
    out.total[s] = total.value();
  }
  if (u.samples() > 0) {
    const double final_total = out.total.back();
    for (auto& cy : out.channels) cy.fraction_of_total = final_total > 0.0 ? cy.yield_at.back() / final_total : 0.0;
  }
  return out;
}

std::vector<Peak> peak_detect(std::span<const SpectrumPoint> spectrum, double relative_prominence) {
  std::vector<Peak> peaks;
  const std::size_t n = spectrum.size();
  if (n < 3) return peaks;
  double global = 0.0;
  for (const auto& s : spectrum) global = std::max(global, s.density);
  if (!(global > 0.0)) return peaks;
  const double threshold = relative_prominence * global;
  auto rho = [&](std::size_t i) { return spectrum[i].density; };

  std::size_t a = 0;
  while (a < n) {
    std::size_t b = a;
    while (b + 1 < n && rho(b + 1) == rho(a)) ++b;
    const double h = rho(a);
    const bool interior = a > 0 && b + 1 < n;
    if (interior && rho(a - 1) < h && rho(b + 1) < h) {
      double left_min = h;
      for (std::size_t i = a; i-- > 0;) {
        if (rho(i) > h) break;
        left_min = std::min(left_min, rho(i));
      }
      double right_min = h;
      for (std::size_t i = b + 1; i < n; ++i) {
        if (rho(i) > h) break;
        right_min = std::min(right_min, rho(i));
      }
      const double prominence = h - std::max(left_min, right_min);
      if (prominence >= threshold) {
        Peak peak{0.5 * (spectrum[a].energy + spectrum[b].energy), h};
        if (a == b) {
          const double l = rho(a - 1), r = rho(a + 1);
          const double curvature = l - 2.0 * h + r;
          if (curvature < 0.0) {
            const double x = 0.5 * (l - r) / curvature;
            const double step = 0.5 * (spectrum[a + 1].energy - spectrum[a - 1].energy);
            peak.energy = spectrum[a].energy + x * step;
            peak.height = h - 0.25 * (l - r) * x;
          }
        }
        peaks.push_back(peak);
      }
    }
    a = b + 1;
  }
  return peaks;
}

}  // namespace pairsim
