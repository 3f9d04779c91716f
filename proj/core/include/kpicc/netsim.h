#pragma once

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "kpicc/cca.h"
#include "kpicc/cca_biscay.h"
#include "kpicc/link_trace.h"
#include "kpicc/modem_emulator.h"
#include "kpicc/units.h"

namespace kpicc {

struct FlowSpec {
  std::string cca = "biscay";
  Micros start{0};
  Micros duration{0};  // 0: until the end of the run
  Protocol protocol = Protocol::kTcp;
};

struct WiredConfig {
  // (time, bit/s) steps; the first entry must be at time 0.
  std::vector<std::pair<Micros, double>> capacity_schedule{{Micros{0}, 1e9}};
  Micros propagation_delay = milliseconds{10};  // each way
  std::uint64_t buffer_bytes = 3'000'000;
};

enum class KpiMethod : std::uint8_t { kGpp3, kGrantedBytes };

const char* ToString(KpiMethod method);

struct KpiConfig {
  KpiMethod method = KpiMethod::kGpp3;
  Micros interval = milliseconds{10};
  BufferPolicy policy = BufferPolicy::Drain();
};

struct Scenario {
  LinkTrace trace;
  RadioConfig radio;
  WiredConfig wired;
  std::vector<FlowSpec> flows;
  std::uint64_t cellular_buffer_bytes = 3'000'000;
  KpiConfig kpi;
  std::uint64_t seed = 1;
  Micros duration{0};  // 0: trace duration
  std::uint32_t mss = kDefaultMss;
  BiscayController::Params biscay{};

  Micros EffectiveDuration() const { return duration > Micros{0} ? duration : trace.duration(); }
};

// Throws ValidationError describing the first problem found.
void Validate(const Scenario& scenario);

enum class LogKind : std::uint8_t {
  kSend,       // seq, bytes
  kDrop,       // seq, bytes, value = hop (0 wired, 1 cellular)
  kDeliver,    // seq, bytes, value = send time (us)
  kAck,        // seq, bytes, value = rtt (us), aux = cwnd after the event
  kLoss,       // seq, bytes: declared lost after three later ACKs
  kTimeout,    // value = packets declared lost
  kState,      // value = new BISCAY state, aux = previous state
  kWiredRate,  // value = bit/s
  kKpi,        // value = bit/s (KPI sample), aux = 1 if valid
  kFlowStart,
  kFlowEnd,
};

const char* ToString(LogKind kind);

struct LogRecord {
  Micros time{0};
  LogKind kind = LogKind::kSend;
  std::uint32_t flow = 0;
  std::uint64_t seq = 0;
  std::uint32_t bytes = 0;
  std::int64_t value = 0;
  std::int64_t aux = 0;

  bool operator==(const LogRecord&) const = default;
};

// Totally ordered by (time, insertion order).
class EventLog {
 public:
  void Append(const LogRecord& record) { records_.push_back(record); }
  const std::vector<LogRecord>& records() const { return records_; }
  bool empty() const { return records_.empty(); }
  Micros end_time() const { return end_time_; }
  void set_end_time(Micros t) { end_time_ = t; }

  // One event per line: `time_us kind key=value ...`.
  void Write(std::ostream& out) const;
  std::string ToText() const;

  bool operator==(const EventLog&) const = default;

 private:
  std::vector<LogRecord> records_;
  Micros end_time_{0};
};

// Per-UE cellular buffer drained by per-TTI grants. Serves whole packets in
// FIFO order; grant left over while packets are still waiting carries to the
// next TTI, grant left over on an empty queue is lost.
class CellularBuffer {
 public:
  struct Entry {
    std::uint32_t id = 0;
    std::uint32_t bytes = 0;
  };

  explicit CellularBuffer(std::uint64_t capacity_bytes) : capacity_(capacity_bytes) {}

  // Tail drop: false if the packet does not fit.
  bool Enqueue(Entry entry);
  void Serve(std::uint64_t grant_bits, std::vector<Entry>& served);

  std::uint64_t queued_bytes() const { return queued_bytes_; }
  std::size_t size() const { return queue_.size(); }
  std::uint64_t credit_bits() const { return credit_bits_; }
  std::uint64_t credit_bytes() const { return credit_bits_ / 8; }
  std::uint64_t capacity() const { return capacity_; }

 private:
  std::uint64_t capacity_;
  std::deque<Entry> queue_;
  std::uint64_t queued_bytes_ = 0;
  std::uint64_t credit_bits_ = 0;
};

// Packets still inside the network when the run stopped.
struct NetworkSnapshot {
  std::uint64_t wired_queue_bytes = 0;
  std::uint64_t wired_in_service_bytes = 0;
  std::uint64_t propagating_bytes = 0;  // wired -> cellular
  std::uint64_t cellular_queue_bytes = 0;
  std::uint64_t over_the_air_bytes = 0;  // served, not yet received

  std::uint64_t total() const {
    return wired_queue_bytes + wired_in_service_bytes + propagating_bytes +
           cellular_queue_bytes + over_the_air_bytes;
  }
};

struct SimResult {
  EventLog log;
  NetworkSnapshot in_network;
  std::uint64_t events_processed = 0;
  std::uint64_t kpi_frames_decoded = 0;
  std::uint64_t clamped_grants = 0;
};

// Deterministic discrete-event run: a pure function of the scenario.
SimResult Run(const Scenario& scenario);

}  // namespace kpicc
