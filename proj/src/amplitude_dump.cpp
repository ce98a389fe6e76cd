#include "pairsim/amplitude_dump.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>

namespace pairsim {

namespace {

constexpr char kMagic[4] = {'U', 'P', 'N', 'M'};

class LittleEndianWriter {
 public:
  explicit LittleEndianWriter(std::ofstream& out) : out_(out) {}

  void u32(std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out_.write(reinterpret_cast<const char*>(b), 4);
  }
  void f64(double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
    out_.write(reinterpret_cast<const char*>(b), 8);
  }

 private:
  std::ofstream& out_;
};

class LittleEndianReader {
 public:
  LittleEndianReader(std::ifstream& in, const std::filesystem::path& path) : in_(in), path_(path) {}

  void bytes(char* dst, std::size_t n) {
    in_.read(dst, static_cast<std::streamsize>(n));
    if (!in_) throw std::runtime_error("amplitude dump " + path_.string() + " is truncated");
  }
  std::uint32_t u32() {
    unsigned char b[4];
    bytes(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
  }
  double f64() {
    unsigned char b[8];
    bytes(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return std::bit_cast<double>(v);
  }

 private:
  std::ifstream& in_;
  const std::filesystem::path& path_;
};

std::uint32_t checked_u32(std::size_t n, const char* what) {
  if (n > std::numeric_limits<std::uint32_t>::max())
    throw std::runtime_error(std::string("amplitude dump: too many ") + what);
  return static_cast<std::uint32_t>(n);
}

// Momentum spacing recovered from the smallest gap between listed momenta.
double momentum_spacing(const std::vector<FreeMode>& modes) {
  double step = 0.0;
  for (std::size_t i = 1; i < modes.size(); ++i) {
    const double gap = std::abs(modes[i].p - modes[i - 1].p);
    if (gap > 0.0 && (step == 0.0 || gap < step)) step = gap;
  }
  return step;
}

}  // namespace

void write_amplitude_dump(const AmplitudeMatrix& u, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  LittleEndianWriter w(out);
  out.write(kMagic, 4);
  w.u32(kAmplitudeDumpVersion);
  w.u32(checked_u32(u.positive.size(), "positive modes"));
  w.u32(checked_u32(u.negative.size(), "negative modes"));
  w.u32(checked_u32(u.samples(), "samples"));
  for (double t : u.sample_times) w.f64(t);
  for (const FreeMode& m : u.positive) w.f64(m.p);
  for (const FreeMode& m : u.negative) w.f64(m.p);
  for (const Complex& a : u.entries) {
    w.f64(a.real());
    w.f64(a.imag());
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

AmplitudeMatrix read_amplitude_dump(const std::filesystem::path& path, const Constants& constants) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open amplitude dump " + path.string());
  LittleEndianReader r(in, path);
  char magic[4];
  r.bytes(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) throw std::runtime_error(path.string() + " is not an amplitude dump");
  const std::uint32_t version = r.u32();
  if (version != kAmplitudeDumpVersion)
    throw std::runtime_error("unsupported amplitude dump version " + std::to_string(version));
  const std::size_t np = r.u32();
  const std::size_t nn = r.u32();
  const std::size_t nt = r.u32();

  AmplitudeMatrix u;
  u.c = constants.c();
  u.sample_times.resize(nt);
  for (double& t : u.sample_times) t = r.f64();
  for (std::size_t i = 0; i < np; ++i) u.positive.push_back(make_mode(r.f64(), 0, constants, Branch::positive));
  for (std::size_t i = 0; i < nn; ++i) u.negative.push_back(make_mode(r.f64(), 0, constants, Branch::negative));
  for (auto* list : {&u.positive, &u.negative}) {
    const double step = momentum_spacing(*list);
    if (step > 0.0)
      for (FreeMode& m : *list) m.k = static_cast<int>(std::lround(m.p / step));
  }
  u.entries.resize(nt * np * nn);
  for (Complex& a : u.entries) {
    const double re = r.f64();
    const double im = r.f64();
    a = {re, im};
  }
  if (in.peek() != std::ifstream::traits_type::eof())
    throw std::runtime_error("amplitude dump " + path.string() + " has trailing bytes");
  return u;
}

}  // namespace pairsim
