#include "kpicc/cca_cubic.h"

#include <algorithm>
#include <cmath>

namespace kpicc {

CubicController::CubicController(FlowState flow)
    : CongestionController(std::move(flow)), cwnd_(flow_.cwnd) {}

double CubicController::K(double w_max, double beta, double c) {
  return std::cbrt(w_max * (1.0 - beta) / c);
}

double CubicController::Window(double t, double w_max, double beta, double c) {
  const double d = t - K(w_max, beta, c);
  return c * d * d * d + w_max;
}

void CubicController::OnEvent(const CongestionEvent& ev) {
  switch (ev.kind) {
    case EventKind::kAck: {
      if (ev.ack_time > ev.send_time) {
        flow_.min_rtt = min_rtt_.Update(ev.ack_time, ev.ack_time - ev.send_time);
      }
      const double acked = PacketsOf(ev.acked_bytes, flow_.mss);
      if (cwnd_ < ssthresh_) {
        cwnd_ += acked;
      } else {
        if (!epoch_start_) {
          epoch_start_ = ev.ack_time;
          if (w_max_ < cwnd_) w_max_ = cwnd_;
        }
        const double rtt = ToSeconds(flow_.min_rtt);
        const double t = ToSeconds(ev.ack_time - *epoch_start_);
        const double target = Window(t + rtt, w_max_);
        if (target > cwnd_) {
          cwnd_ += acked * (target - cwnd_) / cwnd_;
        } else {
          cwnd_ += acked * 0.01 / cwnd_;
        }
        // Reno-friendly floor.
        if (rtt > 0) {
          const double w_est =
              w_max_ * kBeta + 3.0 * (1.0 - kBeta) / (1.0 + kBeta) * (t / rtt);
          cwnd_ = std::max(cwnd_, w_est);
        }
      }
      break;
    }
    case EventKind::kDupAck:
    case EventKind::kEcn:
      if (ev.send_time <= recovery_start_) break;
      OnLoss(ev.ack_time, false);
      break;
    case EventKind::kTimeout:
      OnLoss(ev.ack_time, true);
      break;
  }
  SetCwnd(static_cast<std::uint32_t>(std::max(1.0, std::floor(cwnd_))));
}

void CubicController::OnLoss(Micros now, bool timeout) {
  w_max_ = cwnd_;
  ssthresh_ = std::max(2.0, cwnd_ * kBeta);
  cwnd_ = timeout ? 1.0 : ssthresh_;
  epoch_start_.reset();
  recovery_start_ = now;
}

}  // namespace kpicc
