#include "kpicc/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kpicc/error.h"

namespace kpicc {

std::optional<double> JainIndex(std::span<const double> rates) {
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double x : rates) {
    if (x < 0.0) throw ValidationError("negative rate in Jain index");
    sum += x;
    sum_sq += x * x;
  }
  if (rates.empty() || sum_sq == 0.0) return std::nullopt;
  return sum * sum / (static_cast<double>(rates.size()) * sum_sq);
}

std::vector<std::optional<double>> WindowedJain(const std::vector<std::vector<double>>& rates) {
  std::size_t windows = 0;
  for (const auto& r : rates) windows = std::max(windows, r.size());
  std::vector<std::optional<double>> out;
  out.reserve(windows);
  std::vector<double> column(rates.size());
  for (std::size_t w = 0; w < windows; ++w) {
    for (std::size_t f = 0; f < rates.size(); ++f) {
      column[f] = w < rates[f].size() ? rates[f][w] : 0.0;
    }
    out.push_back(JainIndex(column));
  }
  return out;
}

std::optional<double> Percentile(std::vector<double> samples, double p) {
  if (samples.empty()) return std::nullopt;
  if (p < 0.0 || p > 100.0) throw ValidationError("percentile must be in [0, 100]");
  std::sort(samples.begin(), samples.end());
  const auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(samples.size())));
  return samples[rank == 0 ? 0 : rank - 1];
}

double DelayStats::at(int p) const {
  for (std::size_t i = 0; i < kReportedPercentiles.size(); ++i) {
    if (kReportedPercentiles[i] == p) return percentile_ms[i];
  }
  throw Error("percentile not reported");
}

DelayStats ComputeDelayStats(std::span<const Micros> delays) {
  DelayStats stats;
  stats.samples = delays.size();
  if (delays.empty()) return stats;
  std::vector<double> ms;
  ms.reserve(delays.size());
  for (Micros d : delays) ms.push_back(ToMillis(d));
  stats.mean_ms = std::accumulate(ms.begin(), ms.end(), 0.0) / static_cast<double>(ms.size());
  std::sort(ms.begin(), ms.end());
  for (std::size_t i = 0; i < kReportedPercentiles.size(); ++i) {
    const auto rank = static_cast<std::size_t>(
        std::ceil(kReportedPercentiles[i] / 100.0 * static_cast<double>(ms.size())));
    stats.percentile_ms[i] = ms[std::max<std::size_t>(rank, 1) - 1];
  }
  return stats;
}

namespace {

double PowerOf(double throughput_bps, double mean_delay_ms) {
  return mean_delay_ms > 0.0 ? throughput_bps / (mean_delay_ms * 1e-3) : 0.0;
}

}  // namespace

FlowMetrics ComputeFlowMetrics(const FlowSeries& series, Micros from, Micros to) {
  FlowMetrics m;
  m.flow = series.flow;
  m.sent_bytes = series.sent_bytes;
  m.delivered_bytes = series.delivered_bytes;
  m.dropped_bytes = series.dropped_bytes;
  m.lost_packets = series.lost_packets;
  m.timeouts = series.timeouts;

  const Micros lo = std::max(from, series.start);
  const Micros hi = std::min(to, series.end);
  std::vector<Micros> delays;
  std::uint64_t bytes = 0;
  for (std::size_t i = 0; i < series.delivery_time.size(); ++i) {
    const Micros t = series.delivery_time[i];
    if (t < lo || t >= hi) continue;
    delays.push_back(series.one_way_delay[i]);
    bytes += series.delivery_bytes[i];
  }
  m.delay = ComputeDelayStats(delays);
  if (hi > lo) m.throughput_bps = 8.0 * static_cast<double>(bytes) / ToSeconds(hi - lo);
  m.power = PowerOf(m.throughput_bps, m.delay.mean_ms);
  return m;
}

MetricsReport ComputeReport(const EventLog& log, const std::vector<std::string>& cca_names,
                            Micros jain_window, Micros warmup) {
  MetricsReport report;
  const Measurement m = Measure(log, jain_window);

  std::vector<Micros> all_delays;
  std::vector<double> rates;
  Micros common_start{0};
  Micros common_end = Micros::max();
  for (const auto& [id, series] : m.flows) {
    FlowMetrics fm = ComputeFlowMetrics(series, series.start + warmup);
    if (id < cca_names.size()) fm.cca = cca_names[id];
    rates.push_back(fm.throughput_bps);
    report.aggregate.throughput_bps += fm.throughput_bps;
    report.aggregate.sent_bytes += fm.sent_bytes;
    report.aggregate.delivered_bytes += fm.delivered_bytes;
    report.aggregate.dropped_bytes += fm.dropped_bytes;
    report.aggregate.lost_packets += fm.lost_packets;
    report.aggregate.timeouts += fm.timeouts;
    for (std::size_t i = 0; i < series.delivery_time.size(); ++i) {
      if (series.delivery_time[i] >= series.start + warmup) {
        all_delays.push_back(series.one_way_delay[i]);
      }
    }
    common_start = std::max(common_start, series.start);
    common_end = std::min(common_end, series.end);
    report.flows.push_back(std::move(fm));
  }
  report.aggregate.flow = static_cast<std::uint32_t>(report.flows.size());
  report.aggregate.cca = "all";
  report.aggregate.delay = ComputeDelayStats(all_delays);
  report.aggregate.power = PowerOf(report.aggregate.throughput_bps, report.aggregate.delay.mean_ms);
  report.jain = JainIndex(rates);

  // Only whole windows inside the span where every flow is active.
  const std::int64_t w = jain_window.count();
  const std::int64_t first = (common_start + warmup).count();
  const std::int64_t first_window = (first + w - 1) / w;
  const std::int64_t last_window = common_end.count() / w;  // exclusive
  std::vector<std::vector<double>> per_flow;
  for (const auto& [id, series] : m.flows) {
    std::vector<double> slice;
    for (std::int64_t i = first_window; i < last_window; ++i) {
      slice.push_back(static_cast<std::size_t>(i) < series.throughput_bps.size()
                          ? series.throughput_bps[static_cast<std::size_t>(i)]
                          : 0.0);
    }
    per_flow.push_back(std::move(slice));
  }
  report.jain_windows = WindowedJain(per_flow);
  return report;
}

}  // namespace kpicc
