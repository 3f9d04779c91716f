#pragma once

#include <cstdint>
#include <optional>

#include "kpicc/bandwidth.h"
#include "kpicc/cca.h"
#include "kpicc/cca_bbr_lite.h"

namespace kpicc {

// KPI-driven controller. While the cellular link is the bottleneck the window
// is exactly the BDP of this flow's equal share of the KPI bandwidth and the
// windowed min RTT. When the end-to-end delivery rate falls clearly below that
// share the bottleneck is declared wired and BBR-lite's window takes over
// until the two agree again.
//
//   STARTUP --(K valid KPI samples)--> BISCAY <--(bottleneck moves)--> FALLBACK
class BiscayController final : public CongestionController {
 public:
  enum class State : std::uint8_t { kStartup, kBiscay, kFallback };

  struct Params {
    int startup_valid_samples = 3;
    // More sampling intervals than this without a valid KPI sample gives up on the
    // cellular estimate.
    int stale_intervals = 10;
    BottleneckDetector::Params detector{};
  };

  BiscayController(FlowState flow, const CellularBandwidthFeed& feed,
                   const FlowRegistry& registry);
  BiscayController(FlowState flow, const CellularBandwidthFeed& feed,
                   const FlowRegistry& registry, Params params);

  std::string_view name() const override { return "biscay"; }
  void OnEvent(const CongestionEvent& ev) override;

  State state() const { return state_; }
  // Latest valid KPI bandwidth (whole UE, before splitting), bit/s.
  std::optional<BitsPerSecond> cellular_bps() const { return cellular_bps_; }
  std::optional<double> end_to_end_bps() const { return e2e_filter_.Best(); }
  std::uint32_t stale_count() const { return stale_count_; }
  const BbrLiteController& fallback() const { return fallback_; }
  const BottleneckDetector& detector() const { return detector_; }

 private:
  // Returns true if a fresh valid sample arrived.
  bool IngestKpi(Micros now);
  std::uint32_t KpiCwnd() const;
  double CellularReferenceShare() const;
  void UpdateWindows();

  const CellularBandwidthFeed* feed_;
  const FlowRegistry* registry_;
  Params params_;

  State state_ = State::kStartup;
  BbrLiteController fallback_;
  BottleneckDetector detector_;
  MinRttTracker min_rtt_;

  std::uint64_t seen_seq_ = 0;
  int valid_streak_ = 0;
  std::uint32_t stale_count_ = 0;
  std::optional<BitsPerSecond> cellular_bps_;
  Micros last_valid_kpi_{0};
  Micros rate_valid_from_{0};
  // Delivery-rate samples describe the path one round trip ago, so the
  // bottleneck check compares them with the lowest recent KPI sample.
  WindowedMin<double> cellular_recent_;
  WindowedMax<double> e2e_filter_;
};

const char* ToString(BiscayController::State state);

}  // namespace kpicc
