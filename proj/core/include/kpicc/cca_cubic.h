#pragma once

#include <limits>
#include <optional>

#include "kpicc/cca.h"

namespace kpicc {

// CUBIC window growth: W(t) = C (t - K)^3 + W_max with K = cbrt(W_max (1 - beta) / C).
class CubicController final : public CongestionController {
 public:
  static constexpr double kC = 0.4;
  static constexpr double kBeta = 0.7;

  explicit CubicController(FlowState flow);

  std::string_view name() const override { return "cubic"; }
  void OnEvent(const CongestionEvent& ev) override;

  // Time for the window to climb back to W_max after a reduction, seconds.
  static double K(double w_max, double beta = kBeta, double c = kC);
  // Window (packets) `t` seconds into the current epoch.
  static double Window(double t, double w_max, double beta = kBeta, double c = kC);

  double w_max() const { return w_max_; }
  double ssthresh() const { return ssthresh_; }

 private:
  void OnLoss(Micros now, bool timeout);

  double cwnd_;
  double w_max_ = 0.0;
  double ssthresh_ = std::numeric_limits<double>::infinity();
  std::optional<Micros> epoch_start_;
  Micros recovery_start_{-1};
  MinRttTracker min_rtt_;
};

}  // namespace kpicc
