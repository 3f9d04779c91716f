#include "kpicc/cca_bbr_lite.h"

#include <algorithm>
#include <cmath>

namespace kpicc {

BbrLiteController::BbrLiteController(FlowState flow)
    : CongestionController(std::move(flow)), bw_filter_(seconds{1}) {}

std::optional<double> BbrLiteController::DeliveryRate(const CongestionEvent& ev) {
  if (ev.kind != EventKind::kAck || ev.ack_time <= ev.send_time) return std::nullopt;
  return static_cast<double>(ev.delivered_bytes_since) * 8.0 / ToSeconds(ev.ack_time - ev.send_time);
}

double BbrLiteController::pacing_gain() const {
  return mode_ == Mode::kStartup ? kStartupGain : kGainCycle[cycle_index_];
}

std::optional<double> BbrLiteController::pacing_rate_bps() const {
  const auto bw = bw_filter_.Best();
  if (!bw || *bw <= 0) return std::nullopt;
  return pacing_gain() * *bw;
}

void BbrLiteController::OnEvent(const CongestionEvent& ev) {
  if (ev.kind != EventKind::kAck) return;  // loss-agnostic
  const Micros now = ev.ack_time;
  if (now > ev.send_time) flow_.min_rtt = min_rtt_.Update(now, now - ev.send_time);
  if (flow_.min_rtt > Micros{0}) bw_filter_.set_window(flow_.min_rtt * kBwWindowRounds);
  if (auto rate = DeliveryRate(ev)) bw_filter_.Update(now, *rate);

  if (flow_.min_rtt > Micros{0} && now - round_start_ >= flow_.min_rtt) {
    round_start_ = now;
    OnRoundEnd(now);
  }

  if (!bw_filter_.Best()) {
    // No estimate yet: grow like slow start.
    SetCwnd(SlowStartStep(flow_.cwnd, PacketsOf(ev.acked_bytes, flow_.mss)));
    return;
  }
  UpdateCwnd();
}

void BbrLiteController::OnRoundEnd(Micros now) {
  const double bw = bw_filter_.BestAt(now).value_or(0.0);
  if (mode_ == Mode::kStartup) {
    if (bw >= bw_at_plateau_check_ * kPlateauGrowth) {
      bw_at_plateau_check_ = bw;
      rounds_without_growth_ = 0;
    } else if (++rounds_without_growth_ >= kPlateauRounds) {
      mode_ = Mode::kProbeBw;
      cycle_index_ = 0;
    }
    return;
  }
  cycle_index_ = (cycle_index_ + 1) % kGainCycle.size();
}

void BbrLiteController::UpdateCwnd() {
  const double bw = bw_filter_.Best().value_or(0.0);
  const auto bdp = BdpCwnd(static_cast<BitsPerSecond>(std::llround(bw)), flow_.min_rtt, flow_.mss);
  SetCwnd(static_cast<std::uint32_t>(kCwndGain * bdp));
}

}  // namespace kpicc
