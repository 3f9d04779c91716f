#pragma once

#include <array>
#include <optional>

#include "kpicc/cca.h"

namespace kpicc {

// Simplified BBR: max-filtered delivery rate over 10 round trips, windowed
// min RTT, STARTUP at gain 2.885 until the estimate stops growing by 25% for
// three rounds, then an eight-phase gain cycle. cwnd = 2 x estimated BDP.
// No PROBE_RTT and no DRAIN phase.
class BbrLiteController final : public CongestionController {
 public:
  enum class Mode { kStartup, kProbeBw };

  static constexpr double kStartupGain = 2.885;
  static constexpr double kCwndGain = 2.0;
  static constexpr double kPlateauGrowth = 1.25;
  static constexpr int kPlateauRounds = 3;
  static constexpr int kBwWindowRounds = 10;
  static constexpr std::array<double, 8> kGainCycle = {1.25, 0.75, 1, 1, 1, 1, 1, 1};

  explicit BbrLiteController(FlowState flow);

  std::string_view name() const override { return "bbr-lite"; }
  void OnEvent(const CongestionEvent& ev) override;
  std::optional<double> pacing_rate_bps() const override;

  Mode mode() const { return mode_; }
  // Bottleneck bandwidth estimate in bit/s, nullopt before the first sample.
  std::optional<double> bandwidth_estimate() const { return bw_filter_.Best(); }
  double pacing_gain() const;

  // Delivery rate implied by an ACK event, bit/s.
  static std::optional<double> DeliveryRate(const CongestionEvent& ev);

 private:
  void OnRoundEnd(Micros now);
  void UpdateCwnd();

  Mode mode_ = Mode::kStartup;
  WindowedMax<double> bw_filter_;
  MinRttTracker min_rtt_;
  Micros round_start_{0};
  double bw_at_plateau_check_ = 0.0;
  int rounds_without_growth_ = 0;
  std::size_t cycle_index_ = 0;
};

}  // namespace kpicc
