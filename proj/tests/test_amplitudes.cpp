#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "oracle/dense_propagator.hpp"
#include "oracle/toy_field.hpp"
#include "pairsim/amplitude_dump.hpp"
#include "pairsim/amplitudes.hpp"
#include "pairsim/propagator.hpp"

using namespace pairsim;
namespace fs = std::filesystem;

namespace {

double oracle_gap(const oracle::Toy& toy, std::size_t steps) {
  const Schedule sched = Schedule::uniform(toy.t_total, steps, 1);
  const AmplitudeMatrix u = compute_amplitudes(toy.grid, toy.constants, toy.field, sched, {});
  const oracle::Matrix dense = oracle::time_ordered(toy.grid, toy.constants, toy.field, toy.t_total, steps);
  const oracle::Matrix ref = oracle::amplitudes(dense, u.positive, u.negative, toy.grid);
  double gap = 0.0;
  for (std::size_t p = 0; p < u.positive.size(); ++p)
    for (std::size_t n = 0; n < u.negative.size(); ++n)
      gap = std::max(gap, std::abs(u.at(1, p, n) - ref(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(n))));
  return gap;
}

FieldConfig desk_osc(const Constants& k) {
  return {{0.3 / k.c(), 8.0 / k.c()}, {TimeTerm::sine(1.47 * k.c2(), 1.3 * k.c2())}};
}

}  // namespace

TEST_CASE("select_modes: inclusive cutoffs and errors") {
  const Constants k;
  const GridSpec g(2.5, 1024);
  const auto all = select_modes(g, k, Branch::negative, std::nullopt);
  CHECK(all.size() == 1024);
  const auto cut = select_modes(g, k, Branch::positive, 6.0 * k.c());
  for (const FreeMode& m : cut) CHECK(std::abs(m.p) <= 6.0 * k.c());
  const double step = g.momentum_step();
  const int kmax = static_cast<int>(std::floor(6.0 * k.c() / step));
  CHECK(cut.size() == static_cast<std::size_t>(2 * kmax + 1));
  CHECK(select_modes(g, k, Branch::positive, std::abs(g.momentum(5))).size() == 11);
  CHECK(select_modes(g, k, Branch::positive, 0.0).size() == 1);
  CHECK_THROWS_AS(select_modes(g, k, Branch::positive, 2.0 * g.max_momentum()), std::invalid_argument);
  CHECK_THROWS_AS(select_modes(g, k, Branch::positive, -1.0), std::invalid_argument);
}

TEST_CASE("compute_amplitudes: free field creates nothing") {
  const Constants k;
  const GridSpec g(2.5, 128);
  const FieldConfig free{{0.3 / k.c(), 8.0 / k.c()}, {}};
  const Schedule sched = Schedule::uniform(40.0 * std::numbers::pi / k.c2(), 4000, 10);
  const AmplitudeMatrix u = compute_amplitudes(g, k, free, sched, {});
  double worst = 0.0;
  for (const Complex& x : u.entries) worst = std::max(worst, std::abs(x));
  CHECK(worst <= 1e-12);
  for (std::size_t t = 0; t < u.samples(); ++t) {
    CHECK(pair_number(u, t) <= 1e-12);
    for (double r : spatial_density(u, g, t)) CHECK(std::abs(r) <= 1e-12);
  }
}

TEST_CASE("compute_amplitudes: vanishes at t = 0, bounded per column, rho integrates to N") {
  const Constants k;
  const GridSpec g(2.5, 128);
  const Schedule sched = Schedule::uniform(20.0 * std::numbers::pi / k.c2(), 2000, 4);
  const AmplitudeMatrix u = compute_amplitudes(g, k, desk_osc(k), sched, {});
  REQUIRE(u.samples() == 5);
  CHECK(u.sample_times.front() == 0.0);
  for (const Complex& x : u.slice(0)) CHECK(std::abs(x) <= 1e-15);
  for (std::size_t t = 1; t < u.samples(); ++t) {
    for (std::size_t n = 0; n < u.negative.size(); ++n) {
      double col = 0.0;
      for (std::size_t p = 0; p < u.positive.size(); ++p) col += std::norm(u.at(t, p, n));
      CHECK(col <= 1.0 + 1e-9);
    }
    const double total = pair_number(u, t);
    CHECK(total > 1e-4);
    const auto rho = spatial_density(u, g, t);
    CompensatedSum integral;
    for (double r : rho) {
      CHECK(r >= 0.0);
      integral += r * g.dz();
    }
    CHECK(std::abs(integral.value() - total) <= 1e-8 * std::max(1.0, total));
  }
  CHECK(pair_number_at(u, u.sample_times[2]) == pair_number(u, 2));
  CHECK_THROWS_AS(pair_number_at(u, 0.5 * u.sample_times[1]), std::out_of_range);
  CHECK_THROWS_AS(pair_number(u, 5), std::out_of_range);
}

TEST_CASE("compute_amplitudes: unitarity partition on the full N_z = 64 basis") {
  const Constants k;
  const GridSpec g(2.5, 64);
  const FieldConfig field = desk_osc(k);
  const Schedule sched = Schedule::uniform(20.0 * std::numbers::pi / k.c2(), 2000, 4);
  const AmplitudeMatrix u = compute_amplitudes(g, k, field, sched, {});
  const auto negatives = select_modes(g, k, Branch::negative, std::nullopt);
  double worst = 0.0;
  for (std::size_t n = 0; n < negatives.size(); ++n) {
    const auto snaps = evolve(negatives[n], sched, field, g, k);
    for (std::size_t t = 0; t < u.samples(); ++t) {
      const TwoSpinorField mom = transform(snaps[t], Direction::to_momentum);
      CompensatedSum sum;
      for (std::size_t p = 0; p < u.positive.size(); ++p) sum += std::norm(u.at(t, p, n));
      for (const FreeMode& other : negatives) sum += std::norm(project(other, mom, g));
      worst = std::max(worst, std::abs(sum.value() - 1.0));
    }
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("compute_amplitudes: identical bytes for any worker count") {
  const Constants k;
  const GridSpec g(2.5, 128);
  const Schedule sched = Schedule::uniform(10.0 * std::numbers::pi / k.c2(), 1000, 5);
  const ModeSelection sel{0.6 * k.c(), 0.9 * k.c()};
  const AmplitudeMatrix one = compute_amplitudes(g, k, desk_osc(k), sched, sel, {1});
  for (unsigned w : {2u, 3u, 8u}) {
    const AmplitudeMatrix many = compute_amplitudes(g, k, desk_osc(k), sched, sel, {w});
    REQUIRE(many.entries.size() == one.entries.size());
    CHECK(std::memcmp(many.entries.data(), one.entries.data(), one.entries.size() * sizeof(Complex)) == 0);
    CHECK(pair_number(many, 5) == pair_number(one, 5));
  }
}

TEST_CASE("compute_amplitudes: cutoffs select sub-blocks, N is monotone in the cutoff") {
  const Constants k;
  const GridSpec g(2.5, 128);
  const Schedule sched = Schedule::uniform(10.0 * std::numbers::pi / k.c2(), 1000, 2);
  const AmplitudeMatrix full = compute_amplitudes(g, k, desk_osc(k), sched, {});
  double previous = 0.0;
  for (double cut : {0.2, 0.4, 0.8, 1.1}) {
    const ModeSelection sel{cut * k.c(), cut * k.c()};
    const AmplitudeMatrix part = compute_amplitudes(g, k, desk_osc(k), sched, sel);
    const double n = pair_number(part, 2);
    CHECK(n >= previous);
    CHECK(n <= pair_number(full, 2) + 1e-15);
    previous = n;
    const std::size_t p_off = static_cast<std::size_t>(part.positive.front().k - g.min_index());
    const std::size_t n_off = static_cast<std::size_t>(part.negative.front().k - g.min_index());
    for (std::size_t p = 0; p < part.positive.size(); ++p)
      for (std::size_t q = 0; q < part.negative.size(); ++q)
        CHECK(part.at(2, p, q) == full.at(2, p + p_off, q + n_off));
  }
}

TEST_CASE("compute_amplitudes: memory limit and progress") {
  const Constants k;
  const GridSpec g(2.5, 64);
  const Schedule sched = Schedule::uniform(1e-3, 10, 2);
  SweepOptions opts;
  opts.memory_limit = 1024;
  CHECK_THROWS_AS(compute_amplitudes(g, k, desk_osc(k), sched, {}, opts), ResourceError);
  CHECK(sweep_bytes(g, desk_osc(k), sched, 64, 64) >= 3 * 64 * 64 * sizeof(Complex));

  std::size_t calls = 0, last = 0;
  SweepOptions counting;
  counting.workers = 2;
  counting.progress = [&](std::size_t done, std::size_t total) {
    ++calls;
    last = done;
    CHECK(total == 5);
  };
  compute_amplitudes(g, k, desk_osc(k), sched, {std::abs(g.momentum(2)), std::nullopt}, counting);
  CHECK(calls == 5);
  CHECK(last == 5);
}

TEST_CASE("oracle equivalence: split operator against the dense time-ordered product") {
  for (unsigned seed : {1u, 2u, 3u, 4u, 5u, 6u}) {
    const oracle::Toy toy = oracle::random_toy(seed);
    const double coarse = oracle_gap(toy, 64);
    const double fine = oracle_gap(toy, 128);
    INFO("seed " << seed << ": gap " << coarse << ", ratio " << coarse / fine);
    CHECK(coarse <= 1e-4);
    CHECK(coarse / fine >= 3.3);
    CHECK(coarse / fine <= 4.7);
  }
}

TEST_CASE("static N_z = 64 toy matches the dense exponential within 1e-6") {
  const Constants k(1.0);
  const GridSpec g(30.0, 64);
  const FieldConfig stat{{0.8, 6.0}, {TimeTerm::step(1.5)}};
  const Schedule sched = Schedule::uniform(1.0, 4096, 1);
  const AmplitudeMatrix u = compute_amplitudes(g, k, stat, sched, {});
  const oracle::Matrix dense = oracle::expm_hermitian(oracle::hamiltonian(oracle::free_part(g, k), stat, g, 0.5), 1.0);
  const oracle::Matrix ref = oracle::amplitudes(dense, u.positive, u.negative, g);
  double gap = 0.0, largest = 0.0;
  for (std::size_t p = 0; p < u.positive.size(); ++p)
    for (std::size_t n = 0; n < u.negative.size(); ++n) {
      const Complex r = ref(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(n));
      gap = std::max(gap, std::abs(u.at(1, p, n) - r));
      largest = std::max(largest, std::abs(r));
    }
  CHECK(largest > 1e-3);
  CHECK(gap <= 1e-6);
}

TEST_CASE("amplitude dump: round trip and malformed files") {
  const Constants k;
  const GridSpec g(2.5, 64);
  const Schedule sched = Schedule::uniform(5.0 * std::numbers::pi / k.c2(), 400, 3);
  const AmplitudeMatrix u = compute_amplitudes(g, k, desk_osc(k), sched, {0.3 * k.c(), 0.5 * k.c()});
  const fs::path dir = fs::temp_directory_path() / "pairsim_dump_test";
  fs::create_directories(dir);
  const fs::path file = dir / "u.bin";
  write_amplitude_dump(u, file);
  CHECK(fs::file_size(file) == 20 + 8 * (u.samples() + u.positive.size() + u.negative.size()) + 16 * u.entries.size());

  const AmplitudeMatrix back = read_amplitude_dump(file, k);
  CHECK(back.sample_times == u.sample_times);
  REQUIRE(back.positive.size() == u.positive.size());
  REQUIRE(back.negative.size() == u.negative.size());
  for (std::size_t i = 0; i < u.positive.size(); ++i) {
    CHECK(back.positive[i].k == u.positive[i].k);
    CHECK(back.positive[i].p == u.positive[i].p);
    CHECK(back.positive[i].energy == u.positive[i].energy);
  }
  for (std::size_t i = 0; i < u.negative.size(); ++i) CHECK(back.negative[i].k == u.negative[i].k);
  CHECK(back.entries == u.entries);
  CHECK(pair_number(back, 3) == pair_number(u, 3));

  {
    std::ofstream bad(dir / "bad.bin", std::ios::binary);
    bad << "NOPE and more";
  }
  CHECK_THROWS_AS(read_amplitude_dump(dir / "bad.bin", k), std::runtime_error);
  fs::copy_file(file, dir / "short.bin", fs::copy_options::overwrite_existing);
  fs::resize_file(dir / "short.bin", fs::file_size(file) - 8);
  CHECK_THROWS_AS(read_amplitude_dump(dir / "short.bin", k), std::runtime_error);
  fs::copy_file(file, dir / "long.bin", fs::copy_options::overwrite_existing);
  {
    std::ofstream extra(dir / "long.bin", std::ios::binary | std::ios::app);
    extra << 'x';
  }
  CHECK_THROWS_AS(read_amplitude_dump(dir / "long.bin", k), std::runtime_error);
  CHECK_THROWS_AS(read_amplitude_dump(dir / "missing.bin", k), std::runtime_error);
  fs::remove_all(dir);
}
