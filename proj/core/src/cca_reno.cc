#include "kpicc/cca_reno.h"

#include <algorithm>

namespace kpicc {

void RenoController::OnEvent(const CongestionEvent& ev) {
  switch (ev.kind) {
    case EventKind::kAck: {
      std::uint32_t acked = PacketsOf(ev.acked_bytes, flow_.mss);
      while (acked > 0 && flow_.cwnd < ssthresh_) {
        SetCwnd(flow_.cwnd + 1);
        --acked;
      }
      acked_in_round_ += acked;
      // One packet per full window acknowledged.
      while (acked_in_round_ >= flow_.cwnd) {
        acked_in_round_ -= flow_.cwnd;
        SetCwnd(flow_.cwnd + 1);
      }
      break;
    }
    case EventKind::kDupAck:
    case EventKind::kEcn:
      // One reduction per window of data.
      if (ev.send_time <= recovery_start_) break;
      ssthresh_ = std::max<std::uint32_t>(flow_.cwnd / 2, 2);
      SetCwnd(ssthresh_);
      acked_in_round_ = 0;
      recovery_start_ = ev.ack_time;
      break;
    case EventKind::kTimeout:
      ssthresh_ = std::max<std::uint32_t>(flow_.cwnd / 2, 2);
      SetCwnd(1);
      acked_in_round_ = 0;
      recovery_start_ = ev.ack_time;
      break;
  }
}

}  // namespace kpicc
