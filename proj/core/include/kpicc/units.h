#pragma once

#include <chrono>
#include <cstdint>

namespace kpicc {

// Emulated clock. All simulated time is kept at microsecond resolution.
using Micros = std::chrono::microseconds;

using std::chrono::milliseconds;
using std::chrono::seconds;

// Bits per second. Kept as an unsigned integer where the math is integral
// (grant sums, equal-share splits) and as double for estimators.
using BitsPerSecond = std::uint64_t;

constexpr double ToSeconds(Micros d) { return static_cast<double>(d.count()) * 1e-6; }
constexpr double ToMillis(Micros d) { return static_cast<double>(d.count()) * 1e-3; }

constexpr Micros FromMillis(std::int64_t ms) { return Micros{ms * 1000}; }

enum class Direction : std::uint8_t { kUplink = 0, kDownlink = 1 };

}  // namespace kpicc
