#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace chainlab {

// Simulated time is kept in integer microseconds so event ordering never
// depends on floating point rounding.
using TimeUs = int64_t;

constexpr TimeUs kMillisecond = 1000;
constexpr TimeUs kSecond = 1000 * kMillisecond;

inline double us_to_seconds(TimeUs t) { return static_cast<double>(t) / 1e6; }
inline double us_to_ms(TimeUs t) { return static_cast<double>(t) / 1e3; }

// World-state keys. Account u owns keys 2u (savings) and 2u+1 (checking).
using Key = uint64_t;

using Digest = std::array<uint8_t, 32>;

std::string to_hex(const Digest& d);

// splitmix64, used to derive independent seed streams from one run seed.
uint64_t mix_seed(uint64_t seed, uint64_t stream);

}  // namespace chainlab
