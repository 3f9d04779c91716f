#include "kpicc/cca.h"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "kpicc/cca_bbr_lite.h"
#include "kpicc/cca_biscay.h"
#include "kpicc/cca_cubic.h"
#include "kpicc/cca_reno.h"
#include "kpicc/error.h"

namespace kpicc {

std::string ToString(const FlowId& id) {
  return fmt::format("{}:{}->{}:{}", id.src_addr, id.src_port, id.dst_addr, id.dst_port);
}

const char* ToString(Protocol protocol) { return protocol == Protocol::kTcp ? "tcp" : "udp"; }

const char* ToString(EventKind kind) {
  switch (kind) {
    case EventKind::kAck:
      return "ack";
    case EventKind::kTimeout:
      return "timeout";
    case EventKind::kDupAck:
      return "dupack";
    case EventKind::kEcn:
      return "ecn";
  }
  return "?";
}

void FlowRegistry::Register(const FlowId& id, Protocol protocol) { flows_[id] = protocol; }

void FlowRegistry::Unregister(const FlowId& id) { flows_.erase(id); }

std::size_t FlowRegistry::count(Protocol protocol) const {
  return static_cast<std::size_t>(std::count_if(
      flows_.begin(), flows_.end(), [&](const auto& kv) { return kv.second == protocol; }));
}

std::uint32_t SlowStartStep(std::uint32_t cwnd, std::uint32_t acked_packets) {
  return std::max<std::uint32_t>(cwnd, 1) + acked_packets;
}

BitsPerSecond BwSplitPolicy(BitsPerSecond bw, std::size_t active_flows) {
  assert(active_flows >= 1 && "bandwidth split needs at least one active flow");
  return bw / std::max<std::size_t>(active_flows, 1);
}

BitsPerSecond BwSplitPolicy(BitsPerSecond bw, const FlowRegistry& registry) {
  return BwSplitPolicy(bw, registry.active_count());
}

std::uint32_t BdpCwnd(BitsPerSecond bw, Micros rtt, std::uint32_t mss) {
  if (rtt <= Micros{0} || mss == 0) return 1;
  // Integer arithmetic keeps exact products (e.g. 10 Mbit/s * 60 ms) exact.
  const auto rtt_us = static_cast<std::uint64_t>(rtt.count());
  const std::uint64_t den = 8ull * mss * 1'000'000ull;
  std::uint64_t packets = 0;
  if (bw <= std::numeric_limits<std::uint64_t>::max() / rtt_us) {
    packets = (bw * rtt_us + den - 1) / den;
  } else {
    packets = static_cast<std::uint64_t>(
        std::ceil(static_cast<long double>(bw) * rtt_us / static_cast<long double>(den)));
  }
  const auto capped = std::min<std::uint64_t>(packets, 1u << 30);
  return std::max<std::uint32_t>(static_cast<std::uint32_t>(capped), 1);
}

std::uint32_t CongestionController::PacketsOf(std::uint64_t bytes, std::uint32_t mss) {
  if (bytes == 0) return 0;
  return static_cast<std::uint32_t>((bytes + mss - 1) / mss);
}

bool IsKnownCca(std::string_view name) {
  return std::find(std::begin(kCcaNames), std::end(kCcaNames), name) != std::end(kCcaNames);
}

std::unique_ptr<CongestionController> MakeController(std::string_view name, FlowState flow,
                                                     const ControllerContext& ctx) {
  if (name == "biscay") {
    if (!ctx.feed || !ctx.registry) {
      throw ValidationError("biscay needs a cellular bandwidth feed and a flow registry");
    }
    return std::make_unique<BiscayController>(std::move(flow), *ctx.feed, *ctx.registry);
  }
  if (name == "bbr-lite") return std::make_unique<BbrLiteController>(std::move(flow));
  if (name == "cubic") return std::make_unique<CubicController>(std::move(flow));
  if (name == "reno") return std::make_unique<RenoController>(std::move(flow));
  throw ValidationError(fmt::format("unknown congestion control '{}'", name));
}

}  // namespace kpicc
