#pragma once

#include <cstdint>
#include <filesystem>

#include "pairsim/amplitudes.hpp"

namespace pairsim {

inline constexpr std::uint32_t kAmplitudeDumpVersion = 1;

/// Raw amplitude dump, little-endian:
///   "UPNM", u32 version, u32 N_p, u32 N_n, u32 N_t,
///   N_t f64 sample times, N_p f64 positive momenta, N_n f64 negative momenta,
///   N_t*N_p*N_n (f64 re, f64 im) entries, t-major then p then n.
void write_amplitude_dump(const AmplitudeMatrix& u, const std::filesystem::path& path);

/// Reads a dump back; the speed of light is not stored and must be supplied.
/// Throws std::runtime_error on malformed or truncated files.
AmplitudeMatrix read_amplitude_dump(const std::filesystem::path& path, const Constants& constants);

}  // namespace pairsim
