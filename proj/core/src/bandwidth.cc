#include "kpicc/bandwidth.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kpicc {

const char* ToString(BwMethod method) {
  switch (method) {
    case BwMethod::kGpp3:
      return "gpp3";
    case BwMethod::kGrantedBytes:
      return "granted-bytes";
    case BwMethod::kEndToEnd:
      return "end-to-end";
    case BwMethod::kGroundTruth:
      return "ground-truth";
  }
  return "?";
}

const char* ToString(BottleneckLocation location) {
  return location == BottleneckLocation::kCellular ? "cellular" : "wired";
}

std::uint64_t GrantBits(const DciGrant& grant, const TputTable& table) {
  return static_cast<std::uint64_t>(table.Bits(grant.prb, grant.tbs_index)) * grant.mimo_layers;
}

BandwidthSample Bw3gpp(std::span<const TimedGrant> grants, Micros window_start, Micros window,
                       const TputTable& table) {
  BandwidthSample sample{window_start + window, 0.0, BwMethod::kGpp3, false};
  if (window <= Micros{0}) throw std::invalid_argument("bandwidth window must be positive");
  if (grants.empty()) return sample;
  const Direction dir = grants.front().grant.direction;
  std::uint64_t bits = 0;
  for (const auto& g : grants) {
    if (g.grant.direction != dir) {
      throw std::invalid_argument("grants in one bandwidth window must share a direction");
    }
    bits += GrantBits(g.grant, table);
  }
  sample.bps = static_cast<double>(bits) / ToSeconds(window);
  sample.valid = true;
  return sample;
}

BandwidthSample BwGrantedBytes(const GrantedBytesReport& report, Micros time) {
  if (report.window <= Micros{0}) throw std::invalid_argument("report window must be positive");
  return {time, static_cast<double>(report.bytes_granted) * 8.0 / ToSeconds(report.window),
          BwMethod::kGrantedBytes, true};
}

BottleneckLocation BottleneckDetector::Update(double cellular_bps,
                                              std::optional<double> end_to_end_bps) {
  if (!end_to_end_bps) return location_;
  const double e2e = *end_to_end_bps;
  const bool toward_other = location_ == BottleneckLocation::kCellular
                                ? cellular_bps > (1.0 + params_.hysteresis) * e2e
                                : cellular_bps <= e2e;
  if (!toward_other) {
    streak_ = 0;
    return location_;
  }
  if (++streak_ >= params_.streak) {
    location_ = location_ == BottleneckLocation::kCellular ? BottleneckLocation::kWired
                                                           : BottleneckLocation::kCellular;
    streak_ = 0;
  }
  return location_;
}

std::optional<double> Pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) return std::nullopt;
  const double n = static_cast<double>(a.size());
  double mean_a = 0, mean_b = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    mean_a += a[i];
    mean_b += b[i];
  }
  mean_a /= n;
  mean_b /= n;
  double cov = 0, var_a = 0, var_b = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - mean_a;
    const double db = b[i] - mean_b;
    cov += da * db;
    var_a += da * da;
    var_b += db * db;
  }
  if (var_a == 0 || var_b == 0) return std::nullopt;
  return std::clamp(cov / std::sqrt(var_a * var_b), -1.0, 1.0);
}

KpiBandwidthMonitor::KpiBandwidthMonitor(const TputTable& table, Micros history)
    : table_(&table), history_(history) {}

void KpiBandwidthMonitor::OnFrame(const DiagFrame& frame) {
  const Micros ts{static_cast<std::int64_t>(frame.timestamp_us)};
  if (auto grant = ParseDciGrant(frame)) {
    grants_.push_back({ts, *grant});
    ++grants_seen_;
    while (!grants_.empty() && grants_.front().time < ts - history_) grants_.pop_front();
  } else if (auto report = ParseGrantedBytes(frame)) {
    last_report_ = *report;
    last_report_time_ = ts;
  }
}

BandwidthSample KpiBandwidthMonitor::SampleGpp3(Micros now, Micros window) const {
  const auto by_time = [](const TimedGrant& g, Micros t) { return g.time < t; };
  auto last = std::lower_bound(grants_.begin(), grants_.end(), now, by_time);
  BandwidthSample sample{now, 0.0, BwMethod::kGpp3, false};
  if (last == grants_.begin()) return sample;
  const TimedGrant& newest = *std::prev(last);
  const Micros end = std::min(now, newest.time + newest.grant.tti);
  const Micros start = std::max(end - window, grants_.front().time);
  if (end <= start) return sample;
  auto first = std::lower_bound(grants_.begin(), last, start, by_time);
  std::uint64_t bits = 0;
  for (auto it = first; it != last; ++it) {
    if (it->time < end) bits += GrantBits(it->grant, *table_);
  }
  sample.time = end;
  sample.bps = static_cast<double>(bits) / ToSeconds(end - start);
  sample.valid = true;
  return sample;
}

BandwidthSample KpiBandwidthMonitor::SampleGrantedBytes(Micros now) const {
  if (!last_report_ || last_report_time_ > now) {
    return {now, 0.0, BwMethod::kGrantedBytes, false};
  }
  auto sample = BwGrantedBytes(*last_report_, now);
  return sample;
}

}  // namespace kpicc
