#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "kpicc/netsim.h"
#include "kpicc/units.h"

namespace kpicc {

struct FlowSeries {
  std::uint32_t flow = 0;
  Micros start{0};
  Micros end{0};  // flow end, or the end of the run

  // Delivered bit/s in windows tiling [0, log end).
  std::vector<double> throughput_bps;
  std::vector<Micros> one_way_delay;  // per delivered packet, delivery order
  std::vector<Micros> delivery_time;
  std::vector<std::uint32_t> delivery_bytes;
  std::vector<Micros> rtt;            // per ACK

  std::uint64_t sent_bytes = 0;
  std::uint64_t delivered_bytes = 0;
  std::uint64_t dropped_bytes = 0;
  std::uint64_t lost_packets = 0;  // sender-side loss declarations
  std::uint64_t timeouts = 0;

  // Still in the network at the end of the log.
  std::uint64_t in_flight_bytes() const { return sent_bytes - delivered_bytes - dropped_bytes; }
};

struct Measurement {
  Micros window{0};
  Micros end{0};
  std::map<std::uint32_t, FlowSeries> flows;

  std::uint64_t sent_bytes() const;
  std::uint64_t delivered_bytes() const;
  std::uint64_t dropped_bytes() const;
};

// Per-flow series reconstructed from a finished run's log.
Measurement Measure(const EventLog& log, Micros window = milliseconds{100});

}  // namespace kpicc
