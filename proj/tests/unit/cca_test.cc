#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "kpicc/cca.h"
#include "kpicc/cca_bbr_lite.h"
#include "kpicc/cca_biscay.h"
#include "kpicc/cca_cubic.h"
#include "kpicc/cca_reno.h"
#include "kpicc/error.h"

namespace kpicc {
namespace {

FlowState Flow(std::uint32_t cwnd = kInitialCwnd, std::uint16_t port = 1) {
  FlowState f;
  f.id.src_port = port;
  f.cwnd = cwnd;
  return f;
}

CongestionEvent Ack(Micros send, Micros ack, std::uint64_t bytes = kDefaultMss,
                    std::uint64_t delivered_since = kDefaultMss) {
  CongestionEvent ev;
  ev.kind = EventKind::kAck;
  ev.acked_bytes = bytes;
  ev.send_time = send;
  ev.ack_time = ack;
  ev.delivered_bytes_since = delivered_since;
  return ev;
}

CongestionEvent Loss(EventKind kind, Micros send, Micros now) {
  CongestionEvent ev;
  ev.kind = kind;
  ev.acked_bytes = kDefaultMss;
  ev.send_time = send;
  ev.ack_time = now;
  return ev;
}

// Bytes a `bps` delivery rate moves across `rtt`.
std::uint64_t BytesAt(double bps, Micros rtt) {
  return static_cast<std::uint64_t>(std::llround(bps * ToSeconds(rtt) / 8.0));
}

TEST(FlowRegistry, IdempotentRegisterAndCount) {
  FlowRegistry r;
  FlowId a{1, 2, 3, 4}, b{1, 2, 3, 5};
  r.Register(a, Protocol::kTcp);
  r.Register(a, Protocol::kTcp);
  r.Register(b, Protocol::kUdp);
  EXPECT_EQ(r.active_count(), 2u);
  EXPECT_EQ(r.count(Protocol::kUdp), 1u);
  r.Unregister(b);
  r.Unregister(b);
  EXPECT_EQ(r.active_count(), 1u);
  EXPECT_TRUE(r.Contains(a));
}

TEST(SlowStart, DoublesPerRound) {
  EXPECT_EQ(SlowStartStep(10, 10), 20u);
  EXPECT_EQ(SlowStartStep(1, 1), 2u);
  std::uint32_t c = 4;
  for (int round = 0; round < 3; ++round) c = SlowStartStep(c, c);
  EXPECT_EQ(c, 32u);
}

TEST(BwSplitPolicy, EqualShareFloor) {
  EXPECT_EQ(BwSplitPolicy(12'000'000, 3), 4'000'000u);
  EXPECT_EQ(BwSplitPolicy(12'345'678, 1), 12'345'678u);
  EXPECT_EQ(BwSplitPolicy(10'000'000, 3), 3'333'333u);
  FlowRegistry r;
  for (std::uint16_t p = 0; p < 3; ++p) r.Register({0, 0, p, 0}, Protocol::kTcp);
  EXPECT_EQ(BwSplitPolicy(12'000'000, r), 4'000'000u);
}

TEST(BdpCwnd, HandArithmetic) {
  EXPECT_EQ(BdpCwnd(10'000'000, milliseconds{60}, 1500), 50u);
  EXPECT_EQ(BdpCwnd(0, milliseconds{60}, 1500), 1u);
  EXPECT_EQ(BdpCwnd(4'000'000, milliseconds{50}, 1500), 17u);  // 16.67 up
  EXPECT_EQ(BdpCwnd(7'000'000, milliseconds{50}, 1500), 30u);  // 29.17 up
}

TEST(MinRttTracker, WindowedMinimum) {
  MinRttTracker t(seconds{10});
  EXPECT_EQ(t.Update(Micros{0}, milliseconds{80}), milliseconds{80});
  MinRttTracker u(seconds{10});
  u.Update(seconds{1}, milliseconds{50});
  u.Update(seconds{2}, milliseconds{40});
  EXPECT_EQ(u.Update(seconds{3}, milliseconds{60}), milliseconds{40});

  MinRttTracker v(seconds{10});
  v.Update(Micros{0}, milliseconds{30});
  v.Update(seconds{5}, milliseconds{45});
  EXPECT_EQ(v.Update(seconds{12}, milliseconds{60}), milliseconds{45});
}

TEST(Cubic, KAgainstIndependentFormula) {
  // K = cbrt(W_max * (1 - beta) / C) evaluated with pow instead of cbrt.
  const double reference = std::pow(100.0 * (1.0 - 0.7) / 0.4, 1.0 / 3.0);
  EXPECT_NEAR(CubicController::K(100), reference, 1e-12);
  EXPECT_NEAR(CubicController::K(100), 4.2172, 1e-4);
  EXPECT_NEAR(CubicController::Window(CubicController::K(100), 100), 100.0, 1e-9);
  for (double w : {10.0, 37.0, 512.0}) {
    EXPECT_NEAR(CubicController::K(w), std::pow(w * 0.3 / 0.4, 1.0 / 3.0), 1e-9);
    EXPECT_NEAR(CubicController::Window(0, w), w * 0.7, 1e-9);
  }
}

TEST(Cubic, LossMultipliesByBeta) {
  CubicController c(Flow(100));
  c.OnEvent(Loss(EventKind::kDupAck, milliseconds{1}, milliseconds{50}));
  EXPECT_EQ(c.cwnd(), 70u);
  EXPECT_DOUBLE_EQ(c.w_max(), 100.0);
  // Second loss from the same window is ignored.
  c.OnEvent(Loss(EventKind::kDupAck, milliseconds{2}, milliseconds{51}));
  EXPECT_EQ(c.cwnd(), 70u);
}

TEST(Cubic, GrowsBackTowardWmax) {
  CubicController c(Flow(100));
  c.OnEvent(Loss(EventKind::kDupAck, milliseconds{1}, milliseconds{50}));
  Micros now = milliseconds{50};
  for (int i = 0; i < 5000 && c.cwnd() < 100; ++i) {
    now += milliseconds{2};
    c.OnEvent(Ack(now - milliseconds{50}, now));
  }
  EXPECT_GE(c.cwnd(), 100u);
  // Reached near K seconds after the loss, not much earlier.
  EXPECT_GT(ToSeconds(now - milliseconds{50}), 2.0);
}

TEST(Reno, AvoidanceAddsOnePerWindow) {
  RenoController r(Flow(10));
  r.set_ssthresh(5);
  r.OnEvent(Ack(Micros{0}, milliseconds{50}, 10 * kDefaultMss));
  EXPECT_EQ(r.cwnd(), 11u);
}

TEST(Reno, SlowStartDoubles) {
  RenoController r(Flow(10));
  r.OnEvent(Ack(Micros{0}, milliseconds{50}, 10 * kDefaultMss));
  EXPECT_EQ(r.cwnd(), 20u);
}

TEST(Reno, LossHalvesTimeoutCollapses) {
  RenoController r(Flow(40));
  r.OnEvent(Loss(EventKind::kDupAck, milliseconds{1}, milliseconds{60}));
  EXPECT_EQ(r.cwnd(), 20u);
  EXPECT_EQ(r.ssthresh(), 20u);

  RenoController t(Flow(40));
  t.OnEvent(Loss(EventKind::kTimeout, milliseconds{1}, milliseconds{300}));
  EXPECT_EQ(t.cwnd(), 1u);
  EXPECT_EQ(t.ssthresh(), 20u);
}

TEST(BbrLite, MaxFilteredRateAndCwnd) {
  BbrLiteController b(Flow());
  const Micros rtt = milliseconds{50};
  b.OnEvent(Ack(Micros{0}, rtt, kDefaultMss, BytesAt(5e6, rtt)));
  b.OnEvent(Ack(milliseconds{1}, milliseconds{51}, kDefaultMss, BytesAt(7e6, rtt)));
  b.OnEvent(Ack(milliseconds{2}, milliseconds{52}, kDefaultMss, BytesAt(6e6, rtt)));
  ASSERT_TRUE(b.bandwidth_estimate());
  EXPECT_NEAR(*b.bandwidth_estimate(), 7e6, 1.0);
  EXPECT_EQ(b.flow().min_rtt, rtt);
  EXPECT_EQ(b.cwnd(), 60u);  // 2 x ceil(7e6 * 0.05 / 12000)
  ASSERT_TRUE(b.pacing_rate_bps());
  EXPECT_NEAR(*b.pacing_rate_bps(), BbrLiteController::kStartupGain * 7e6, 10.0);
}

TEST(BbrLite, PlateauExitsStartup) {
  BbrLiteController b(Flow());
  const Micros rtt = milliseconds{50};
  // Round ends every 50 ms; the first one sets the baseline.
  for (int round = 1; round <= 3; ++round) {
    const Micros now = rtt * round;
    b.OnEvent(Ack(now - rtt, now, kDefaultMss, BytesAt(5e6, rtt)));
    EXPECT_EQ(b.mode(), BbrLiteController::Mode::kStartup) << round;
  }
  b.OnEvent(Ack(rtt * 3, rtt * 4, kDefaultMss, BytesAt(5.5e6, rtt)));
  EXPECT_EQ(b.mode(), BbrLiteController::Mode::kProbeBw);
}

TEST(BbrLite, GrowthKeepsStartup) {
  BbrLiteController b(Flow());
  const Micros rtt = milliseconds{50};
  double rate = 1e6;
  for (int round = 1; round <= 8; ++round, rate *= 1.5) {
    b.OnEvent(Ack(rtt * (round - 1), rtt * round, kDefaultMss, BytesAt(rate, rtt)));
  }
  EXPECT_EQ(b.mode(), BbrLiteController::Mode::kStartup);
}

TEST(MakeController, NamesAndErrors) {
  CellularBandwidthFeed feed;
  FlowRegistry registry;
  const ControllerContext ctx{&feed, &registry};
  for (auto name : kCcaNames) EXPECT_EQ(MakeController(name, Flow(), ctx)->name(), name);
  EXPECT_THROW(MakeController("vegas", Flow(), ctx), ValidationError);
  EXPECT_THROW(MakeController("biscay", Flow(), ControllerContext{}), ValidationError);
  EXPECT_FALSE(IsKnownCca("vegas"));
}

// Drives a BISCAY flow with one ACK per millisecond at a fixed RTT and a KPI
// sample every `interval`.
class BiscayHarness {
 public:
  BiscayHarness(std::size_t flows, Micros rtt = milliseconds{50})
      : feed_(milliseconds{10}), rtt_(rtt) {
    for (std::uint16_t p = 1; p <= flows; ++p) registry_.Register({0, 0, p, 0}, Protocol::kTcp);
    cca_ = std::make_unique<BiscayController>(Flow(), feed_, registry_);
  }

  void Publish(double bps, bool valid = true) {
    BandwidthSample s;
    s.time = now_;
    s.bps = bps;
    s.valid = valid;
    feed_.Publish(s);
  }

  // Advances one millisecond and delivers one ACK whose delivery rate is
  // `e2e_bps`.
  void Step(double e2e_bps) {
    now_ += milliseconds{1};
    cca_->OnEvent(Ack(now_ - rtt_, now_, kDefaultMss, BytesAt(e2e_bps, rtt_)));
  }

  // Runs `ms` milliseconds, publishing `cellular_bps` every 10 ms.
  void Run(int ms, double cellular_bps, double e2e_bps) {
    for (int i = 0; i < ms; ++i) {
      if (now_.count() % 10'000 == 0) Publish(cellular_bps);
      Step(e2e_bps);
    }
  }

  BiscayController& cca() { return *cca_; }
  Micros now() const { return now_; }

 private:
  CellularBandwidthFeed feed_;
  FlowRegistry registry_;
  Micros rtt_;
  Micros now_{0};
  std::unique_ptr<BiscayController> cca_;
};

using State = BiscayController::State;

TEST(Biscay, StartupNeedsKValidSamples) {
  BiscayHarness h(1);
  h.Publish(12e6);
  h.Step(1e6);
  h.Publish(12e6);
  h.Step(1e6);
  EXPECT_EQ(h.cca().state(), State::kStartup);
  EXPECT_EQ(h.cca().cwnd(), 12u);  // slow start, one packet per ACK
  h.Publish(12e6);
  h.Step(1e6);
  EXPECT_EQ(h.cca().state(), State::kBiscay);
}

TEST(Biscay, InvalidSampleResetsStreak) {
  BiscayHarness h(1);
  h.Publish(12e6);
  h.Step(1e6);
  h.Publish(12e6);
  h.Step(1e6);
  h.Publish(0, false);
  h.Step(1e6);
  h.Publish(12e6);
  h.Step(1e6);
  EXPECT_EQ(h.cca().state(), State::kStartup);
}

TEST(Biscay, BdpCwndForShare) {
  BiscayHarness h(3);
  for (int i = 0; i < 3; ++i) {
    h.Publish(12e6);
    h.Step(4e6);
  }
  ASSERT_EQ(h.cca().state(), State::kBiscay);
  h.Step(4e6);
  EXPECT_EQ(h.cca().flow().min_rtt, milliseconds{50});
  EXPECT_EQ(h.cca().cwnd(), 17u);  // 4e6 * 0.05 / 12000 = 16.7
  // Holds while the e2e rate matches the share.
  h.Run(500, 12e6, 4e6);
  EXPECT_EQ(h.cca().state(), State::kBiscay);
  EXPECT_EQ(h.cca().cwnd(), 17u);
}

TEST(Biscay, WiredBottleneckTriggersFallback) {
  BiscayHarness h(1);
  h.Run(30, 20e6, 20e6);
  ASSERT_EQ(h.cca().state(), State::kBiscay);
  h.Run(200, 20e6, 10e6);
  EXPECT_EQ(h.cca().state(), State::kFallback);
  EXPECT_EQ(h.cca().cwnd(), h.cca().fallback().cwnd());
  // And back once the end-to-end rate catches up.
  h.Run(300, 20e6, 20e6);
  EXPECT_EQ(h.cca().state(), State::kBiscay);
  EXPECT_EQ(h.cca().cwnd(), BdpCwnd(20'000'000, milliseconds{50}, kDefaultMss));
}

TEST(Biscay, StaleKpiRevertsToFallback) {
  BiscayHarness h(1);
  h.Run(30, 20e6, 20e6);
  ASSERT_EQ(h.cca().state(), State::kBiscay);
  const Micros last = h.now();
  // Exactly ten silent intervals: still holding the previous window.
  while (h.now() < last + milliseconds{100}) h.Step(20e6);
  EXPECT_EQ(h.cca().state(), State::kBiscay);
  EXPECT_EQ(h.cca().cwnd(), BdpCwnd(20'000'000, milliseconds{50}, kDefaultMss));
  while (h.now() < last + milliseconds{115}) h.Step(20e6);
  EXPECT_EQ(h.cca().state(), State::kFallback);
}

TEST(Biscay, InvariantsUnderRandomEvents) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    CellularBandwidthFeed feed(milliseconds{10});
    FlowRegistry registry;
    registry.Register({}, Protocol::kTcp);
    BiscayController c(Flow(), feed, registry);
    State prev = c.state();
    Micros now{0};
    bool acked = false;
    for (int i = 0; i < 5000; ++i) {
      now += Micros{static_cast<std::int64_t>(100 + rng() % 3000)};
      if (rng() % 8 == 0) {
        BandwidthSample s;
        s.time = now;
        s.bps = static_cast<double>(rng() % 50'000'000);
        s.valid = rng() % 10 != 0;
        feed.Publish(s);
      }
      const auto rtt = Micros{static_cast<std::int64_t>(10'000 + rng() % 200'000)};
      const auto roll = rng() % 20;
      if (roll == 0) {
        c.OnEvent(Loss(EventKind::kTimeout, now - rtt, now));
      } else if (roll == 1) {
        c.OnEvent(Loss(EventKind::kDupAck, now - rtt, now));
      } else {
        c.OnEvent(Ack(now - rtt, now, kDefaultMss, rng() % 100'000));
        acked = true;
      }
      ASSERT_GE(c.cwnd(), 1u);
      if (acked) ASSERT_GT(c.flow().min_rtt, Micros{0});
      const State s = c.state();
      if (s != prev) {
        const bool allowed = (prev == State::kStartup && s == State::kBiscay) ||
                             (prev == State::kBiscay && s == State::kFallback) ||
                             (prev == State::kFallback && s == State::kBiscay);
        ASSERT_TRUE(allowed) << ToString(prev) << " -> " << ToString(s);
      }
      prev = s;
    }
  }
}

}  // namespace
}  // namespace kpicc
