#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>

#include "kpicc/bandwidth.h"
#include "kpicc/units.h"
#include "kpicc/windowed_filter.h"

namespace kpicc {

struct FlowId {
  std::uint32_t src_addr = 0;
  std::uint32_t dst_addr = 0;
  std::uint16_t src_port = 0;
  std::uint16_t dst_port = 0;

  auto operator<=>(const FlowId&) const = default;
};

std::string ToString(const FlowId& id);

enum class Protocol : std::uint8_t { kTcp, kUdp };

const char* ToString(Protocol protocol);

enum class EventKind : std::uint8_t { kAck, kTimeout, kDupAck, kEcn };

const char* ToString(EventKind kind);

// One congestion-control callback. For kAck, `acked_bytes` is newly
// acknowledged data and send_time/ack_time bracket the acked packet's round
// trip. For kDupAck/kTimeout, `acked_bytes` is the data declared lost and
// send_time is the lost packet's send time.
struct CongestionEvent {
  EventKind kind = EventKind::kAck;
  std::uint64_t acked_bytes = 0;
  Micros send_time{0};
  Micros ack_time{0};
  // Bytes acknowledged between send_time and ack_time, this packet included.
  std::uint64_t delivered_bytes_since = 0;
  FlowId flow_id;
};

inline constexpr std::uint32_t kDefaultMss = 1500;
inline constexpr std::uint32_t kInitialCwnd = 10;
inline constexpr Micros kMinRttWindow = seconds{10};

struct FlowState {
  FlowId id;
  Protocol protocol = Protocol::kTcp;
  std::uint32_t cwnd = kInitialCwnd;  // packets, always >= 1
  Micros min_rtt{0};                  // 0 until measured
  std::uint32_t mss = kDefaultMss;
};

// Active TCP and UDP flows sharing the cellular link.
class FlowRegistry {
 public:
  // Both idempotent per flow id.
  void Register(const FlowId& id, Protocol protocol);
  void Unregister(const FlowId& id);

  bool Contains(const FlowId& id) const { return flows_.contains(id); }
  std::size_t active_count() const { return flows_.size(); }
  std::size_t count(Protocol protocol) const;

 private:
  std::map<FlowId, Protocol> flows_;
};

// One packet per acked packet: doubles the window each round trip.
std::uint32_t SlowStartStep(std::uint32_t cwnd, std::uint32_t acked_packets = 1);

// Equal share of `bw` among the registry's active flows (integer floor).
// The registry must hold at least one flow.
BitsPerSecond BwSplitPolicy(BitsPerSecond bw, const FlowRegistry& registry);
BitsPerSecond BwSplitPolicy(BitsPerSecond bw, std::size_t active_flows);

// ceil(bw * rtt / (8 * mss)) packets, never below 1.
std::uint32_t BdpCwnd(BitsPerSecond bw, Micros rtt, std::uint32_t mss);

// Trailing-window minimum RTT.
class MinRttTracker {
 public:
  explicit MinRttTracker(Micros window = kMinRttWindow) : filter_(window) {}
  Micros Update(Micros now, Micros sample) { return filter_.Update(now, sample); }
  std::optional<Micros> value() const { return filter_.Best(); }

 private:
  WindowedMin<Micros> filter_;
};

class CongestionController {
 public:
  explicit CongestionController(FlowState flow) : flow_(std::move(flow)) {}
  virtual ~CongestionController() = default;

  virtual std::string_view name() const = 0;
  virtual void OnEvent(const CongestionEvent& ev) = 0;
  // nullopt: not paced, the window alone limits sending.
  virtual std::optional<double> pacing_rate_bps() const { return std::nullopt; }

  std::uint32_t cwnd() const { return flow_.cwnd; }
  const FlowState& flow() const { return flow_; }

 protected:
  static std::uint32_t PacketsOf(std::uint64_t bytes, std::uint32_t mss);
  void SetCwnd(std::uint32_t cwnd) { flow_.cwnd = cwnd < 1 ? 1 : cwnd; }

  FlowState flow_;
};

// Cellular bandwidth as seen by the congestion controllers: one KPI-derived
// sample per sampling interval.
class CellularBandwidthFeed {
 public:
  explicit CellularBandwidthFeed(Micros interval = milliseconds{10}) : interval_(interval) {}

  void Publish(const BandwidthSample& sample) {
    latest_ = sample;
    ++seq_;
  }

  const BandwidthSample& latest() const { return latest_; }
  std::uint64_t seq() const { return seq_; }
  Micros interval() const { return interval_; }

 private:
  Micros interval_;
  BandwidthSample latest_{};
  std::uint64_t seq_ = 0;
};

// State shared by every flow's controller on one UE.
struct ControllerContext {
  const CellularBandwidthFeed* feed = nullptr;
  const FlowRegistry* registry = nullptr;
};

inline constexpr std::string_view kCcaNames[] = {"biscay", "bbr-lite", "cubic", "reno"};

bool IsKnownCca(std::string_view name);

// Throws ValidationError for unknown names or a biscay request without a
// feed and registry in `ctx`.
std::unique_ptr<CongestionController> MakeController(std::string_view name, FlowState flow,
                                                     const ControllerContext& ctx);

}  // namespace kpicc
