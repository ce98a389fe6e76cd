#include "pairsim/fields.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pairsim {

void FieldConfig::validate() const {
  if (!(shape.width > 0.0) || !std::isfinite(shape.width))
    throw std::invalid_argument("well edge width must be positive, got " + std::to_string(shape.width));
  if (!(shape.extension > 0.0) || !std::isfinite(shape.extension))
    throw std::invalid_argument("well extension must be positive, got " + std::to_string(shape.extension));
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const TimeTerm& t = terms[i];
    const std::string where = "field term " + std::to_string(i) + ": ";
    if (!std::isfinite(t.amplitude)) throw std::invalid_argument(where + "amplitude must be finite");
    if (!std::isfinite(t.phase)) throw std::invalid_argument(where + "phase must be finite");
    if (!(t.frequency >= 0.0) || !std::isfinite(t.frequency))
      throw std::invalid_argument(where + "frequency must be >= 0");
    if (t.kind == TermKind::static_step && t.frequency != 0.0)
      throw std::invalid_argument(where + "static step must have zero frequency");
    if (!(t.ramp >= 0.0) || !std::isfinite(t.ramp)) throw std::invalid_argument(where + "ramp must be >= 0");
  }
}

bool FieldConfig::is_static() const noexcept {
  for (const TimeTerm& t : terms)
    if (t.kind != TermKind::static_step || t.ramp > 0.0) return false;
  return true;
}

double FieldConfig::static_height() const noexcept {
  double v = 0.0;
  for (const TimeTerm& t : terms)
    if (t.kind == TermKind::static_step) v += t.amplitude;
  return v;
}

std::vector<double> FieldConfig::frequencies() const {
  std::vector<double> out;
  for (const TimeTerm& t : terms)
    if (t.kind == TermKind::sinusoid) out.push_back(t.frequency);
  return out;
}

double sauter_shape(double z, const WellShape& shape) noexcept {
  const double half = 0.5 * shape.extension;
  return 0.5 * (std::tanh((z - half) / shape.width) - std::tanh((z + half) / shape.width));
}

double potential_height(const FieldConfig& config, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("potential_height: time must be >= 0");
  double v = 0.0;
  for (const TimeTerm& term : config.terms) {
    double value = term.kind == TermKind::static_step ? term.amplitude
                                                        : term.amplitude * std::sin(term.frequency * t + term.phase);
    if (term.ramp > 0.0 && t < term.ramp) {
      const double s = std::sin(0.5 * std::numbers::pi * t / term.ramp);
      value *= s * s;
    }
    v += value;
  }
  return v;
}

std::vector<double> shape_profile(const WellShape& shape, const GridSpec& grid) {
  std::vector<double> s(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) s[j] = sauter_shape(grid.position(j), shape);
  return s;
}

std::vector<double> potential_profile(const FieldConfig& config, const GridSpec& grid, double t) {
  const double height = potential_height(config, t);
  std::vector<double> profile = shape_profile(config.shape, grid);
  for (double& v : profile) v *= height;
  return profile;
}

}  // namespace pairsim
