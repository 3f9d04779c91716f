#include "kpicc/cca_biscay.h"

#include <algorithm>
#include <cmath>

namespace kpicc {

const char* ToString(BiscayController::State state) {
  switch (state) {
    case BiscayController::State::kStartup:
      return "STARTUP";
    case BiscayController::State::kBiscay:
      return "BISCAY";
    case BiscayController::State::kFallback:
      return "FALLBACK";
  }
  return "?";
}

BiscayController::BiscayController(FlowState flow, const CellularBandwidthFeed& feed,
                                   const FlowRegistry& registry)
    : BiscayController(std::move(flow), feed, registry, Params{}) {}

BiscayController::BiscayController(FlowState flow, const CellularBandwidthFeed& feed,
                                   const FlowRegistry& registry, Params params)
    : CongestionController(flow),
      feed_(&feed),
      registry_(&registry),
      params_(params),
      fallback_(flow),
      detector_(params.detector),
      cellular_recent_(feed.interval() * 2),
      e2e_filter_(feed.interval() * 2) {}

bool BiscayController::IngestKpi(Micros now) {
  bool fresh = false;
  if (feed_->seq() != seen_seq_) {
    seen_seq_ = feed_->seq();
    const BandwidthSample& s = feed_->latest();
    if (s.valid) {
      cellular_bps_ = static_cast<BitsPerSecond>(std::llround(std::max(0.0, s.bps)));
      last_valid_kpi_ = s.time;
      cellular_recent_.Update(s.time, s.bps);
      ++valid_streak_;
      fresh = true;
    } else {
      valid_streak_ = 0;
    }
  }
  const Micros interval = std::max(feed_->interval(), Micros{1});
  stale_count_ = fresh ? 0 : static_cast<std::uint32_t>((now - last_valid_kpi_) / interval);
  return fresh;
}

std::uint32_t BiscayController::KpiCwnd() const {
  const BitsPerSecond share = BwSplitPolicy(cellular_bps_.value_or(0), *registry_);
  return BdpCwnd(share, flow_.min_rtt, flow_.mss);
}

double BiscayController::CellularReferenceShare() const {
  const double reference = cellular_recent_.Best().value_or(0.0);
  return reference / static_cast<double>(std::max<std::size_t>(registry_->active_count(), 1));
}

void BiscayController::UpdateWindows() {
  const Micros rtt = flow_.min_rtt;
  if (rtt <= Micros{0}) return;
  e2e_filter_.set_window(rtt);
  cellular_recent_.set_window(std::max(rtt * 2, feed_->interval() * 2));
}

void BiscayController::OnEvent(const CongestionEvent& ev) {
  const Micros now = ev.ack_time;
  // The fallback model sees every event so it is warm when it takes over.
  fallback_.OnEvent(ev);

  if (ev.kind == EventKind::kAck) {
    if (now > ev.send_time) flow_.min_rtt = min_rtt_.Update(now, now - ev.send_time);
    UpdateWindows();
    // A rate sample measures the ACK clock of the previous round, so samples
    // are ignored until a full round has been sent under the KPI window.
    if (auto rate = BbrLiteController::DeliveryRate(ev); rate && ev.send_time >= rate_valid_from_) {
      e2e_filter_.Update(now, *rate);
    }
  }
  e2e_filter_.Expire(now);

  const bool fresh = IngestKpi(now);

  switch (state_) {
    case State::kStartup:
      if (ev.kind == EventKind::kAck) {
        SetCwnd(SlowStartStep(flow_.cwnd, PacketsOf(ev.acked_bytes, flow_.mss)));
      }
      if (valid_streak_ >= params_.startup_valid_samples) {
        state_ = State::kBiscay;
        last_valid_kpi_ = now;
        rate_valid_from_ = now + flow_.min_rtt;
        e2e_filter_.Reset();
      }
      break;

    case State::kBiscay:
      if (stale_count_ > static_cast<std::uint32_t>(params_.stale_intervals)) {
        state_ = State::kFallback;
        detector_ = BottleneckDetector(params_.detector, BottleneckLocation::kWired);
        SetCwnd(fallback_.cwnd());
        break;
      }
      if (flow_.min_rtt > Micros{0} && cellular_bps_) SetCwnd(KpiCwnd());
      if (fresh &&
          detector_.Update(CellularReferenceShare(), end_to_end_bps()) ==
              BottleneckLocation::kWired) {
        state_ = State::kFallback;
        SetCwnd(fallback_.cwnd());
      }
      break;

    case State::kFallback:
      SetCwnd(fallback_.cwnd());
      if (fresh &&
          detector_.Update(CellularReferenceShare(), end_to_end_bps()) ==
              BottleneckLocation::kCellular) {
        state_ = State::kBiscay;
        if (flow_.min_rtt > Micros{0}) SetCwnd(KpiCwnd());
      }
      break;
  }
}

}  // namespace kpicc
