#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "kpicc/units.h"

namespace kpicc {

struct TraceSample {
  std::int64_t time_ms = 0;
  double capacity_bps = 0.0;

  bool operator==(const TraceSample&) const = default;
};

// Piecewise-constant ground-truth capacity. Sample i holds over
// [time_i, time_{i+1}); the last sample marks the end of the trace.
class LinkTrace {
 public:
  LinkTrace() = default;
  // Throws ValidationError if times are not strictly increasing or a
  // capacity is negative.
  explicit LinkTrace(std::vector<TraceSample> samples);

  const std::vector<TraceSample>& samples() const { return samples_; }
  bool empty() const { return samples_.empty(); }
  Micros duration() const;

  double CapacityAt(Micros t) const;
  // Mean capacity over [from, to).
  double MeanCapacity(Micros from, Micros to) const;
  double PeakCapacity() const;

  bool operator==(const LinkTrace&) const = default;

 private:
  std::vector<TraceSample> samples_;
};

// CSV with header `time_ms,capacity_bps`. Errors cite the 1-based line.
LinkTrace ReadTraceCsv(std::istream& in);
LinkTrace LoadTraceCsv(const std::filesystem::path& path);
void WriteTraceCsv(const LinkTrace& trace, std::ostream& out);
void SaveTraceCsv(const LinkTrace& trace, const std::filesystem::path& path);

struct RandomWalkProfile {
  double min_mbps = 5.0;
  double max_mbps = 50.0;
  double step_mbps = 5.0;        // max change per interval
  std::int64_t interval_ms = 100;
  std::int64_t duration_ms = 60'000;
  std::uint64_t seed = 1;
};

// Seeded random walk reflected into [min, max]; capacities are whole bit/s.
LinkTrace GenerateRandomWalk(const RandomWalkProfile& profile);

LinkTrace ConstantTrace(double capacity_bps, std::int64_t duration_ms);

}  // namespace kpicc
