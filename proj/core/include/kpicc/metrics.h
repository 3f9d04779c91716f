#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kpicc/measure.h"
#include "kpicc/units.h"

namespace kpicc {

// (sum x)^2 / (n * sum x^2); nullopt for an empty or all-zero input.
std::optional<double> JainIndex(std::span<const double> rates);

// rates[flow][window] -> one index per window; windows where every flow
// is idle are nullopt.
std::vector<std::optional<double>> WindowedJain(const std::vector<std::vector<double>>& rates);

// Nearest-rank percentile, p in [0, 100]. nullopt for no samples.
std::optional<double> Percentile(std::vector<double> samples, double p);

inline constexpr std::array<int, 7> kReportedPercentiles = {10, 25, 50, 75, 90, 95, 99};

struct DelayStats {
  std::size_t samples = 0;
  double mean_ms = 0.0;
  std::array<double, kReportedPercentiles.size()> percentile_ms{};

  double at(int p) const;  // one of kReportedPercentiles
};

DelayStats ComputeDelayStats(std::span<const Micros> delays);

struct FlowMetrics {
  std::uint32_t flow = 0;
  std::string cca;
  double throughput_bps = 0.0;  // over the flow's active period
  DelayStats delay;
  double power = 0.0;  // bit/s per second of mean one-way delay
  std::uint64_t sent_bytes = 0;
  std::uint64_t delivered_bytes = 0;
  std::uint64_t dropped_bytes = 0;
  std::uint64_t lost_packets = 0;
  std::uint64_t timeouts = 0;
};

// Delay samples come from packets delivered in [from, to); throughput from
// bytes delivered in the same span, clipped to the flow's active period.
FlowMetrics ComputeFlowMetrics(const FlowSeries& series, Micros from = Micros{0},
                               Micros to = Micros::max());

struct MetricsReport {
  std::vector<FlowMetrics> flows;
  FlowMetrics aggregate;
  std::optional<double> jain;
  std::vector<std::optional<double>> jain_windows;
};

// Windowed Jain uses `jain_window` tiles over the span where every flow is
// active.
MetricsReport ComputeReport(const EventLog& log, const std::vector<std::string>& cca_names,
                            Micros jain_window = seconds{1}, Micros warmup = Micros{0});

}  // namespace kpicc
