#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>

#include "kpicc/diag_frame.h"
#include "kpicc/tput_table.h"
#include "kpicc/units.h"

namespace kpicc {

struct TimedGrant {
  Micros time{0};  // TTI start
  DciGrant grant;

  bool operator==(const TimedGrant&) const = default;
};

enum class BwMethod : std::uint8_t { kGpp3, kGrantedBytes, kEndToEnd, kGroundTruth };

const char* ToString(BwMethod method);

struct BandwidthSample {
  Micros time{0};
  double bps = 0.0;
  BwMethod method = BwMethod::kGpp3;
  bool valid = false;  // false: no grants/report backed this sample
};

// Bits one grant carries in its TTI: table[prb, tbs] * mimo_layers.
std::uint64_t GrantBits(const DciGrant& grant, const TputTable& table);

// Per-TTI cellular bandwidth summed over carriers, averaged across a window.
// `grants` must all share one direction. The sample is flagged invalid (and
// its value is 0) when the window holds no grants.
BandwidthSample Bw3gpp(std::span<const TimedGrant> grants, Micros window_start, Micros window,
                       const TputTable& table);

BandwidthSample BwGrantedBytes(const GrantedBytesReport& report, Micros time);

enum class BottleneckLocation : std::uint8_t { kCellular, kWired };

const char* ToString(BottleneckLocation location);

// Decides where the bottleneck sits by comparing the KPI-derived cellular
// bandwidth with the end-to-end delivery rate. Cellular -> Wired needs
// cellular > (1 + h) * e2e for k consecutive samples; Wired -> Cellular
// needs cellular <= e2e for k consecutive samples.
class BottleneckDetector {
 public:
  struct Params {
    double hysteresis = 0.1;
    int streak = 3;
  };

  BottleneckDetector() = default;
  explicit BottleneckDetector(Params params,
                              BottleneckLocation initial = BottleneckLocation::kCellular)
      : params_(params), location_(initial) {}

  BottleneckLocation Update(double cellular_bps, std::optional<double> end_to_end_bps);

  BottleneckLocation location() const { return location_; }
  int streak() const { return streak_; }
  const Params& params() const { return params_; }

 private:
  Params params_{};
  BottleneckLocation location_ = BottleneckLocation::kCellular;
  int streak_ = 0;
};

// Sample Pearson correlation. nullopt when lengths differ, fewer than two
// points, or either series is constant.
std::optional<double> Pearson(std::span<const double> a, std::span<const double> b);

// Consumer side of the KPI channel: keeps the recently delivered grants and
// granted-bytes reports and turns them into bandwidth samples on demand.
class KpiBandwidthMonitor {
 public:
  explicit KpiBandwidthMonitor(const TputTable& table, Micros history = milliseconds{2000});

  void OnFrame(const DiagFrame& frame);

  // Bandwidth over the latest `window` of delivered grants: the window ends
  // where delivered data ends (at most `now`), and the sample is stamped with
  // that time so consumers can judge staleness. Shorter history is averaged
  // over what is there.
  BandwidthSample SampleGpp3(Micros now, Micros window) const;

  // Most recent granted-bytes report delivered at or before `now`.
  BandwidthSample SampleGrantedBytes(Micros now) const;

  std::uint64_t grants_seen() const { return grants_seen_; }

 private:
  const TputTable* table_;
  Micros history_;
  std::deque<TimedGrant> grants_;
  std::optional<GrantedBytesReport> last_report_;
  Micros last_report_time_{0};
  std::uint64_t grants_seen_ = 0;
};

}  // namespace kpicc
