#include "pairsim/spinor_field.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace pairsim {

namespace {

// Never destroyed: plans held in static caches are released during exit.
std::mutex& planner_mutex() {
  static auto* m = new std::mutex;
  return *m;
}

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

TwoSpinorField::TwoSpinorField(const GridSpec& grid, Representation rep)
    : points_(grid.size()), length_(grid.length()), rep_(rep), data_(2 * grid.size(), Complex{}) {}

double TwoSpinorField::weight() const noexcept {
  return rep_ == Representation::position ? length_ / static_cast<double>(points_) : 1.0;
}

double TwoSpinorField::squared_norm() const noexcept {
  CompensatedSum s;
  for (const Complex& v : data_) s += std::norm(v);
  return s.value() * weight();
}

Complex inner_product(const TwoSpinorField& a, const TwoSpinorField& b) {
  if (a.size() != b.size() || a.length() != b.length())
    throw std::invalid_argument("inner_product: fields live on different grids");
  if (a.representation() != b.representation())
    throw std::invalid_argument("inner_product: representation mismatch");
  const auto x = a.data();
  const auto y = b.data();
  CompensatedSum re, im;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Complex t = std::conj(x[i]) * y[i];
    re += t.real();
    im += t.imag();
  }
  return Complex{re.value(), im.value()} * a.weight();
}

// FFTW_ESTIMATE keeps plan selection, and therefore every output bit,
// identical from run to run.
struct FourierTransform::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

FourierTransform::FourierTransform(const GridSpec& grid)
    : points_(grid.size()), length_(grid.length()), plans_(std::make_unique<Plans>()) {
  ComplexBuffer scratch(2 * points_);
  const int n = static_cast<int>(points_);
  std::lock_guard lock(planner_mutex());
  plans_->forward = fftw_plan_many_dft(1, &n, 2, as_fftw(scratch.data()), nullptr, 1, n, as_fftw(scratch.data()),
                                       nullptr, 1, n, FFTW_FORWARD, FFTW_ESTIMATE);
  plans_->backward = fftw_plan_many_dft(1, &n, 2, as_fftw(scratch.data()), nullptr, 1, n, as_fftw(scratch.data()),
                                        nullptr, 1, n, FFTW_BACKWARD, FFTW_ESTIMATE);
  if (plans_->forward == nullptr || plans_->backward == nullptr)
    throw std::runtime_error("FFTW failed to create plans for N=" + std::to_string(points_));
}

FourierTransform::~FourierTransform() {
  std::lock_guard lock(planner_mutex());
  if (plans_->forward) fftw_destroy_plan(plans_->forward);
  if (plans_->backward) fftw_destroy_plan(plans_->backward);
}

// c_k = (dz / sqrt(L)) sum_j psi_j e^{-i p_k z_j}, and p_k z_j = -pi k + 2 pi k j / N,
// so the FFT output picks up (-1)^k; since N is even (-1)^k = (-1)^slot.
void FourierTransform::to_momentum(TwoSpinorField& state) const {
  if (state.size() != points_) throw std::invalid_argument("transform: grid size mismatch");
  if (state.representation() != Representation::position)
    throw std::invalid_argument("transform: state is not in position representation");
  auto d = state.data();
  fftw_execute_dft(plans_->forward, as_fftw(d.data()), as_fftw(d.data()));
  const double scale = std::sqrt(length_) / static_cast<double>(points_);
  for (std::size_t c = 0; c < 2; ++c) {
    Complex* v = d.data() + c * points_;
    for (std::size_t m = 0; m < points_; m += 2) {
      v[m] *= scale;
      v[m + 1] *= -scale;
    }
  }
  state.set_representation(Representation::momentum);
}

void FourierTransform::to_position(TwoSpinorField& state) const {
  if (state.size() != points_) throw std::invalid_argument("transform: grid size mismatch");
  if (state.representation() != Representation::momentum)
    throw std::invalid_argument("transform: state is not in momentum representation");
  auto d = state.data();
  const double scale = 1.0 / std::sqrt(length_);
  for (std::size_t c = 0; c < 2; ++c) {
    Complex* v = d.data() + c * points_;
    for (std::size_t m = 0; m < points_; m += 2) {
      v[m] *= scale;
      v[m + 1] *= -scale;
    }
  }
  fftw_execute_dft(plans_->backward, as_fftw(d.data()), as_fftw(d.data()));
  state.set_representation(Representation::position);
}

void FourierTransform::apply(TwoSpinorField& state, Direction direction) const {
  if (direction == Direction::to_momentum)
    to_momentum(state);
  else
    to_position(state);
}

std::shared_ptr<const FourierTransform> FourierTransform::shared(const GridSpec& grid) {
  static std::mutex cache_mutex;
  static std::map<std::pair<std::size_t, double>, std::shared_ptr<const FourierTransform>> cache;
  std::lock_guard lock(cache_mutex);
  auto& slot = cache[{grid.size(), grid.length()}];
  if (!slot) slot = std::make_shared<FourierTransform>(grid);
  return slot;
}

TwoSpinorField transform(const TwoSpinorField& state, Direction direction) {
  const Representation source =
      direction == Direction::to_momentum ? Representation::position : Representation::momentum;
  if (state.representation() != source) throw std::invalid_argument("transform: representation mismatch");
  TwoSpinorField out = state;
  FourierTransform::shared(GridSpec(state.length(), state.size()))->apply(out, direction);
  return out;
}

}  // namespace pairsim
