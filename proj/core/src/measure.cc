#include "kpicc/measure.h"

#include <algorithm>

#include "kpicc/error.h"

namespace kpicc {

std::uint64_t Measurement::sent_bytes() const {
  std::uint64_t total = 0;
  for (const auto& [id, f] : flows) total += f.sent_bytes;
  return total;
}

std::uint64_t Measurement::delivered_bytes() const {
  std::uint64_t total = 0;
  for (const auto& [id, f] : flows) total += f.delivered_bytes;
  return total;
}

std::uint64_t Measurement::dropped_bytes() const {
  std::uint64_t total = 0;
  for (const auto& [id, f] : flows) total += f.dropped_bytes;
  return total;
}

Measurement Measure(const EventLog& log, Micros window) {
  if (window <= Micros{0}) throw ValidationError("measurement window must be positive");
  Measurement m;
  m.window = window;
  m.end = log.end_time();
  for (const auto& r : log.records()) m.end = std::max(m.end, r.time);
  if (log.empty()) return m;

  const auto windows = static_cast<std::size_t>((m.end.count() + window.count() - 1) / window.count());
  auto flow = [&](std::uint32_t id) -> FlowSeries& {
    auto [it, inserted] = m.flows.try_emplace(id);
    if (inserted) {
      it->second.flow = id;
      it->second.end = m.end;
      it->second.throughput_bps.assign(windows, 0.0);
    }
    return it->second;
  };

  for (const auto& r : log.records()) {
    switch (r.kind) {
      case LogKind::kFlowStart:
        flow(r.flow).start = r.time;
        break;
      case LogKind::kFlowEnd:
        flow(r.flow).end = r.time;
        break;
      case LogKind::kSend:
        flow(r.flow).sent_bytes += r.bytes;
        break;
      case LogKind::kDrop:
        flow(r.flow).dropped_bytes += r.bytes;
        break;
      case LogKind::kDeliver: {
        FlowSeries& f = flow(r.flow);
        f.delivered_bytes += r.bytes;
        f.one_way_delay.push_back(r.time - Micros{r.value});
        f.delivery_time.push_back(r.time);
        f.delivery_bytes.push_back(r.bytes);
        if (windows > 0) {
          const auto idx = std::min(static_cast<std::size_t>(r.time.count() / window.count()),
                                    windows - 1);
          f.throughput_bps[idx] += 8.0 * r.bytes;
        }
        break;
      }
      case LogKind::kAck:
        flow(r.flow).rtt.push_back(Micros{r.value});
        break;
      case LogKind::kLoss:
        ++flow(r.flow).lost_packets;
        break;
      case LogKind::kTimeout:
        ++flow(r.flow).timeouts;
        break;
      default:
        break;
    }
  }

  for (auto& [id, f] : m.flows) {
    for (std::size_t i = 0; i < f.throughput_bps.size(); ++i) {
      const Micros lo = window * static_cast<std::int64_t>(i);
      const Micros hi = std::min(lo + window, m.end);
      f.throughput_bps[i] /= ToSeconds(hi - lo);
    }
  }
  return m;
}

}  // namespace kpicc
