#pragma once

#include <limits>

#include "kpicc/cca.h"

namespace kpicc {

// Classic AIMD: slow start below ssthresh, +1 packet per round trip in
// avoidance, halve on loss, collapse to one packet on timeout.
class RenoController final : public CongestionController {
 public:
  explicit RenoController(FlowState flow) : CongestionController(std::move(flow)) {}

  std::string_view name() const override { return "reno"; }
  void OnEvent(const CongestionEvent& ev) override;

  std::uint32_t ssthresh() const { return ssthresh_; }
  void set_ssthresh(std::uint32_t v) { ssthresh_ = v; }

 private:
  std::uint32_t ssthresh_ = std::numeric_limits<std::uint32_t>::max();
  std::uint32_t acked_in_round_ = 0;
  Micros recovery_start_{-1};
};

}  // namespace kpicc
