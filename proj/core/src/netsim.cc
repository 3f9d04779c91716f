#include "kpicc/netsim.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <ostream>
#include <queue>
#include <sstream>

#include <fmt/format.h>

#include "kpicc/bandwidth.h"
#include "kpicc/diag_channel.h"
#include "kpicc/error.h"
#include "kpicc/frame_decoder.h"

namespace kpicc {

const char* ToString(KpiMethod method) {
  return method == KpiMethod::kGpp3 ? "gpp3" : "granted-bytes";
}

const char* ToString(LogKind kind) {
  switch (kind) {
    case LogKind::kSend:
      return "send";
    case LogKind::kDrop:
      return "drop";
    case LogKind::kDeliver:
      return "deliver";
    case LogKind::kAck:
      return "ack";
    case LogKind::kLoss:
      return "loss";
    case LogKind::kTimeout:
      return "timeout";
    case LogKind::kState:
      return "state";
    case LogKind::kWiredRate:
      return "wired_rate";
    case LogKind::kKpi:
      return "kpi";
    case LogKind::kFlowStart:
      return "flow_start";
    case LogKind::kFlowEnd:
      return "flow_end";
  }
  return "?";
}

void EventLog::Write(std::ostream& out) const {
  for (const auto& r : records_) {
    out << fmt::format("{} {} flow={} seq={} bytes={} value={} aux={}\n", r.time.count(),
                       ToString(r.kind), r.flow, r.seq, r.bytes, r.value, r.aux);
  }
}

std::string EventLog::ToText() const {
  std::ostringstream out;
  Write(out);
  return out.str();
}

bool CellularBuffer::Enqueue(Entry entry) {
  if (queued_bytes_ + entry.bytes > capacity_) return false;
  queue_.push_back(entry);
  queued_bytes_ += entry.bytes;
  return true;
}

void CellularBuffer::Serve(std::uint64_t grant_bits, std::vector<Entry>& served) {
  credit_bits_ += grant_bits;
  while (!queue_.empty() && credit_bits_ >= 8ull * queue_.front().bytes) {
    credit_bits_ -= 8ull * queue_.front().bytes;
    queued_bytes_ -= queue_.front().bytes;
    served.push_back(queue_.front());
    queue_.pop_front();
  }
  if (queue_.empty()) credit_bits_ = 0;
}

void Validate(const Scenario& s) {
  if (s.trace.empty() || s.trace.duration() <= Micros{0}) {
    throw ValidationError("scenario trace has zero duration");
  }
  Validate(s.radio);
  if (s.EffectiveDuration() <= Micros{0}) throw ValidationError("scenario duration must be > 0");
  if (s.wired.capacity_schedule.empty() || s.wired.capacity_schedule.front().first != Micros{0}) {
    throw ValidationError("wired capacity schedule must start at time 0");
  }
  for (std::size_t i = 0; i < s.wired.capacity_schedule.size(); ++i) {
    if (s.wired.capacity_schedule[i].second <= 0) {
      throw ValidationError(fmt::format("wired schedule entry {} has non-positive capacity", i));
    }
    if (i > 0 && s.wired.capacity_schedule[i].first <= s.wired.capacity_schedule[i - 1].first) {
      throw ValidationError(fmt::format("wired schedule entry {} is out of order", i));
    }
  }
  if (s.wired.propagation_delay < Micros{0}) throw ValidationError("negative propagation delay");
  if (s.flows.empty()) throw ValidationError("scenario has no flows");
  for (std::size_t i = 0; i < s.flows.size(); ++i) {
    if (!IsKnownCca(s.flows[i].cca)) {
      throw ValidationError(fmt::format("flow {}: unknown cca '{}'", i, s.flows[i].cca));
    }
    if (s.flows[i].start < Micros{0} || s.flows[i].duration < Micros{0}) {
      throw ValidationError(fmt::format("flow {}: negative start or duration", i));
    }
  }
  if (s.kpi.interval <= Micros{0}) throw ValidationError("kpi interval must be positive");
  if (s.kpi.policy.period <= Micros{0}) throw ValidationError("buffer policy period must be positive");
  if (s.mss == 0 || s.mss > 65535) throw ValidationError("mss out of range");
  if (s.cellular_buffer_bytes < s.mss || s.wired.buffer_bytes < s.mss) {
    throw ValidationError("buffers must hold at least one packet");
  }
}

namespace {

enum class EvType : std::uint8_t {
  kFlowStart,
  kFlowStop,
  kSendReady,
  kWiredDeparture,
  kCellArrive,
  kReceive,
  kAckArrive,
  kRtoCheck,
  kWiredRate,
  kModemTick,
  kKpiSample,
};

struct Event {
  Micros time;
  std::uint64_t order;
  EvType type;
  std::uint32_t a = 0;  // flow or packet index
  std::uint64_t b = 0;  // generation / schedule index

  bool operator>(const Event& o) const {
    return time != o.time ? time > o.time : order > o.order;
  }
};

struct Packet {
  std::uint32_t flow = 0;
  std::uint64_t seq = 0;
  std::uint32_t bytes = 0;
  Micros send_time{0};
  std::uint64_t delivered_at_send = 0;
};

struct InFlight {
  std::uint32_t packet = 0;
  int later_acks = 0;
};

struct Sender {
  FlowSpec spec;
  FlowId id;
  std::unique_ptr<CongestionController> cca;
  bool active = false;
  bool send_scheduled = false;
  std::uint64_t next_seq = 0;
  std::map<std::uint64_t, InFlight> inflight;
  std::uint64_t delivered_bytes = 0;
  Micros next_send_time{0};
  Micros srtt{0};
  Micros rto = milliseconds{1000};
  std::uint64_t rto_generation = 0;
  bool rto_armed = false;
  int last_state = -1;
};

constexpr Micros kMinRto = milliseconds{200};
constexpr Micros kMaxRto = seconds{60};
constexpr int kDupAckThreshold = 3;

class Simulation {
 public:
  explicit Simulation(const Scenario& s)
      : s_(s),
        end_(s.EffectiveDuration()),
        modem_(s.trace, s.radio, s.kpi.policy, s.seed),
        monitor_(s.radio.table),
        feed_(s.kpi.interval),
        cellular_(s.cellular_buffer_bytes) {
    channel_.AddListener([this](const DiagFrame& f) { monitor_.OnFrame(f); });
    modem_.SetGrantSink([this](const TimedGrant& g) { OnGrant(g); });
    modem_.SetReleaseSink([this](std::span<const DiagFrame> frames, Micros) {
      // The modem hands the host a byte stream; parse it back into frames.
      wire_.clear();
      for (const auto& f : frames) AppendEncodedFrame(f, wire_);
      decoded_.clear();
      decoder_.Feed(wire_, decoded_);
      for (const auto& f : decoded_) channel_.Publish(f);
    });
  }

  SimResult Run() {
    ControllerContext ctx{&feed_, &registry_};
    for (std::size_t i = 0; i < s_.flows.size(); ++i) {
      Sender snd;
      snd.spec = s_.flows[i];
      snd.id = FlowId{0x0A000001, 0x0A000002, static_cast<std::uint16_t>(40000 + i), 5201};
      FlowState state;
      state.id = snd.id;
      state.protocol = snd.spec.protocol;
      state.mss = s_.mss;
      if (snd.spec.cca == "biscay") {
        snd.cca = std::make_unique<BiscayController>(state, feed_, registry_, s_.biscay);
      } else {
        snd.cca = MakeController(snd.spec.cca, state, ctx);
      }
      senders_.push_back(std::move(snd));
      Schedule(s_.flows[i].start, EvType::kFlowStart, static_cast<std::uint32_t>(i));
      if (s_.flows[i].duration > Micros{0}) {
        Schedule(s_.flows[i].start + s_.flows[i].duration, EvType::kFlowStop,
                 static_cast<std::uint32_t>(i));
      }
    }
    for (std::size_t i = 0; i < s_.wired.capacity_schedule.size(); ++i) {
      Schedule(s_.wired.capacity_schedule[i].first, EvType::kWiredRate, 0, i);
    }
    Schedule(Micros{0}, EvType::kModemTick);
    Schedule(s_.kpi.interval, EvType::kKpiSample);

    while (!queue_.empty()) {
      const Event ev = queue_.top();
      if (ev.time > end_) break;
      queue_.pop();
      now_ = ev.time;
      ++result_.events_processed;
      Dispatch(ev);
    }
    result_.log.set_end_time(end_);
    Snapshot();
    result_.kpi_frames_decoded = decoder_.diagnostics().frames;
    result_.clamped_grants = modem_.clamped_grants();
    return std::move(result_);
  }

 private:
  void Schedule(Micros t, EvType type, std::uint32_t a = 0, std::uint64_t b = 0) {
    queue_.push(Event{t, order_++, type, a, b});
  }

  void Log(LogKind kind, std::uint32_t flow, std::uint64_t seq = 0, std::uint32_t bytes = 0,
           std::int64_t value = 0, std::int64_t aux = 0) {
    result_.log.Append(LogRecord{now_, kind, flow, seq, bytes, value, aux});
  }

  void Dispatch(const Event& ev) {
    switch (ev.type) {
      case EvType::kFlowStart:
        StartFlow(ev.a);
        break;
      case EvType::kFlowStop:
        StopFlow(ev.a);
        break;
      case EvType::kSendReady:
        senders_[ev.a].send_scheduled = false;
        TrySend(ev.a);
        break;
      case EvType::kWiredDeparture:
        WiredDeparture(ev.a);
        break;
      case EvType::kCellArrive:
        CellArrive(ev.a);
        break;
      case EvType::kReceive:
        Receive(ev.a);
        break;
      case EvType::kAckArrive:
        AckArrive(ev.a);
        break;
      case EvType::kRtoCheck:
        RtoCheck(ev.a, ev.b);
        break;
      case EvType::kWiredRate:
        wired_rate_ = s_.wired.capacity_schedule[ev.b].second;
        Log(LogKind::kWiredRate, 0, 0, 0, std::llround(wired_rate_));
        break;
      case EvType::kModemTick:
        ModemTick();
        break;
      case EvType::kKpiSample:
        KpiSample();
        break;
    }
  }

  // Sender ---------------------------------------------------------------

  void StartFlow(std::uint32_t f) {
    Sender& snd = senders_[f];
    snd.active = true;
    registry_.Register(snd.id, snd.spec.protocol);
    Log(LogKind::kFlowStart, f);
    LogStateChange(f);
    TrySend(f);
  }

  void StopFlow(std::uint32_t f) {
    Sender& snd = senders_[f];
    snd.active = false;
    registry_.Unregister(snd.id);
    Log(LogKind::kFlowEnd, f);
  }

  void TrySend(std::uint32_t f) {
    Sender& snd = senders_[f];
    while (snd.active && snd.inflight.size() < snd.cca->cwnd()) {
      const auto pacing = snd.cca->pacing_rate_bps();
      if (pacing && now_ < snd.next_send_time) {
        if (!snd.send_scheduled) {
          snd.send_scheduled = true;
          Schedule(snd.next_send_time, EvType::kSendReady, f);
        }
        return;
      }
      SendPacket(f);
      if (pacing && *pacing > 0) {
        const auto gap = Micros{static_cast<std::int64_t>(
            std::ceil(static_cast<double>(s_.mss) * 8.0 / *pacing * 1e6))};
        snd.next_send_time = std::max(snd.next_send_time, now_) + gap;
      }
    }
  }

  void SendPacket(std::uint32_t f) {
    Sender& snd = senders_[f];
    const auto id = static_cast<std::uint32_t>(packets_.size());
    packets_.push_back(Packet{f, snd.next_seq++, s_.mss, now_, snd.delivered_bytes});
    const Packet& p = packets_.back();
    snd.inflight.emplace(p.seq, InFlight{id, 0});
    Log(LogKind::kSend, f, p.seq, p.bytes);
    if (!snd.rto_armed) ArmRto(f);
    WiredEnqueue(id);
  }

  void ArmRto(std::uint32_t f) {
    Sender& snd = senders_[f];
    snd.rto_armed = true;
    Schedule(now_ + snd.rto, EvType::kRtoCheck, f, ++snd.rto_generation);
  }

  void AckArrive(std::uint32_t id) {
    const Packet& p = packets_[id];
    Sender& snd = senders_[p.flow];
    auto it = snd.inflight.find(p.seq);
    if (it == snd.inflight.end()) return;  // already written off by a timeout
    snd.inflight.erase(it);
    snd.delivered_bytes += p.bytes;

    const Micros rtt = now_ - p.send_time;
    snd.srtt = snd.srtt == Micros{0} ? rtt : (snd.srtt * 7 + rtt) / 8;
    snd.rto = std::clamp(snd.srtt * 2, kMinRto, kMaxRto);

    CongestionEvent ev;
    ev.kind = EventKind::kAck;
    ev.acked_bytes = p.bytes;
    ev.send_time = p.send_time;
    ev.ack_time = now_;
    ev.delivered_bytes_since = snd.delivered_bytes - p.delivered_at_send;
    ev.flow_id = snd.id;
    snd.cca->OnEvent(ev);
    Log(LogKind::kAck, p.flow, p.seq, p.bytes, rtt.count(), snd.cca->cwnd());

    // The path is FIFO, so anything older still outstanding was dropped;
    // declare it lost once three later packets are acknowledged.
    for (auto hole = snd.inflight.begin(); hole != snd.inflight.end() && hole->first < p.seq;) {
      if (++hole->second.later_acks < kDupAckThreshold) {
        ++hole;
        continue;
      }
      const Packet& lost = packets_[hole->second.packet];
      Log(LogKind::kLoss, p.flow, lost.seq, lost.bytes);
      CongestionEvent loss;
      loss.kind = EventKind::kDupAck;
      loss.acked_bytes = lost.bytes;
      loss.send_time = lost.send_time;
      loss.ack_time = now_;
      loss.flow_id = snd.id;
      snd.cca->OnEvent(loss);
      hole = snd.inflight.erase(hole);
    }

    LogStateChange(p.flow);
    snd.rto_armed = false;
    if (!snd.inflight.empty()) ArmRto(p.flow);
    TrySend(p.flow);
  }

  void RtoCheck(std::uint32_t f, std::uint64_t generation) {
    Sender& snd = senders_[f];
    if (generation != snd.rto_generation || !snd.rto_armed) return;
    snd.rto_armed = false;
    if (snd.inflight.empty()) return;
    Log(LogKind::kTimeout, f, 0, 0, static_cast<std::int64_t>(snd.inflight.size()));
    const Packet& oldest = packets_[snd.inflight.begin()->second.packet];
    CongestionEvent ev;
    ev.kind = EventKind::kTimeout;
    ev.acked_bytes = snd.inflight.size() * s_.mss;
    ev.send_time = oldest.send_time;
    ev.ack_time = now_;
    ev.flow_id = snd.id;
    snd.inflight.clear();
    snd.cca->OnEvent(ev);
    snd.rto = std::min(snd.rto * 2, kMaxRto);
    LogStateChange(f);
    TrySend(f);
  }

  void LogStateChange(std::uint32_t f) {
    Sender& snd = senders_[f];
    const auto* biscay = dynamic_cast<const BiscayController*>(snd.cca.get());
    if (!biscay) return;
    const int state = static_cast<int>(biscay->state());
    if (state != snd.last_state) {
      Log(LogKind::kState, f, 0, 0, state, snd.last_state);
      snd.last_state = state;
    }
  }

  // Wired segment ---------------------------------------------------------

  void WiredEnqueue(std::uint32_t id) {
    const Packet& p = packets_[id];
    if (wired_queue_bytes_ + p.bytes > s_.wired.buffer_bytes) {
      Log(LogKind::kDrop, p.flow, p.seq, p.bytes, 0);
      return;
    }
    wired_queue_.push_back(id);
    wired_queue_bytes_ += p.bytes;
    if (!wired_busy_) StartWiredService();
  }

  void StartWiredService() {
    const std::uint32_t id = wired_queue_.front();
    wired_queue_.pop_front();
    wired_queue_bytes_ -= packets_[id].bytes;
    wired_in_service_ = id;
    wired_busy_ = true;
    const auto tx = Micros{std::max<std::int64_t>(
        1, static_cast<std::int64_t>(
               std::ceil(static_cast<double>(packets_[id].bytes) * 8.0 / wired_rate_ * 1e6)))};
    Schedule(now_ + tx, EvType::kWiredDeparture, id);
  }

  void WiredDeparture(std::uint32_t id) {
    wired_busy_ = false;
    propagating_bytes_ += packets_[id].bytes;
    Schedule(now_ + s_.wired.propagation_delay, EvType::kCellArrive, id);
    if (!wired_queue_.empty()) StartWiredService();
  }

  // Cellular segment ------------------------------------------------------

  void CellArrive(std::uint32_t id) {
    const Packet& p = packets_[id];
    propagating_bytes_ -= p.bytes;
    if (!cellular_.Enqueue({id, p.bytes})) Log(LogKind::kDrop, p.flow, p.seq, p.bytes, 1);
  }

  void OnGrant(const TimedGrant& g) {
    served_.clear();
    cellular_.Serve(GrantBits(g.grant, s_.radio.table), served_);
    for (const auto& e : served_) {
      over_the_air_bytes_ += e.bytes;
      Schedule(g.time + g.grant.tti, EvType::kReceive, e.id);
    }
  }

  void Receive(std::uint32_t id) {
    const Packet& p = packets_[id];
    over_the_air_bytes_ -= p.bytes;
    Log(LogKind::kDeliver, p.flow, p.seq, p.bytes, p.send_time.count());
    // ACKs return over an uncongested reverse path.
    Schedule(now_ + s_.wired.propagation_delay, EvType::kAckArrive, id);
  }

  void ModemTick() {
    modem_.AdvanceTo(now_);
    const Micros next = modem_.NextEventTime();
    if (next != Micros::max()) Schedule(std::max(next, now_ + Micros{1}), EvType::kModemTick);
  }

  void KpiSample() {
    const BandwidthSample sample = s_.kpi.method == KpiMethod::kGpp3
                                       ? monitor_.SampleGpp3(now_, s_.kpi.interval)
                                       : monitor_.SampleGrantedBytes(now_);
    feed_.Publish(sample);
    Log(LogKind::kKpi, 0, 0, 0, std::llround(sample.bps), sample.valid ? 1 : 0);
    Schedule(now_ + s_.kpi.interval, EvType::kKpiSample);
  }

  void Snapshot() {
    NetworkSnapshot& n = result_.in_network;
    n.wired_queue_bytes = wired_queue_bytes_;
    n.wired_in_service_bytes = wired_busy_ ? packets_[wired_in_service_].bytes : 0;
    n.propagating_bytes = propagating_bytes_;
    n.cellular_queue_bytes = cellular_.queued_bytes();
    n.over_the_air_bytes = over_the_air_bytes_;
  }

  const Scenario& s_;
  const Micros end_;
  Micros now_{0};
  std::uint64_t order_ = 0;
  std::priority_queue<Event, std::vector<Event>, std::greater<Event>> queue_;
  SimResult result_;

  ModemEmulator modem_;
  FrameDecoder decoder_;
  DiagChannel channel_;
  KpiBandwidthMonitor monitor_;
  CellularBandwidthFeed feed_;
  FlowRegistry registry_;
  std::vector<std::uint8_t> wire_;
  std::vector<DiagFrame> decoded_;

  std::vector<Sender> senders_;
  std::vector<Packet> packets_;

  std::deque<std::uint32_t> wired_queue_;
  std::uint64_t wired_queue_bytes_ = 0;
  bool wired_busy_ = false;
  std::uint32_t wired_in_service_ = 0;
  double wired_rate_ = 1e9;
  std::uint64_t propagating_bytes_ = 0;

  CellularBuffer cellular_;
  std::vector<CellularBuffer::Entry> served_;
  std::uint64_t over_the_air_bytes_ = 0;
};

}  // namespace

SimResult Run(const Scenario& scenario) {
  Validate(scenario);
  Simulation sim(scenario);
  return sim.Run();
}

}  // namespace kpicc
