#include <gtest/gtest.h>

#include <cmath>

#include <algorithm>
#include <random>

#include "kpicc/bandwidth.h"
#include "kpicc/error.h"
#include "kpicc/frame_decoder.h"
#include "kpicc/modem_emulator.h"

namespace kpicc {
namespace {

RadioConfig Radio(std::uint8_t tbs = 10, std::size_t carriers = 1) {
  RadioConfig cfg;
  cfg.carriers.assign(carriers, CarrierConfig{});
  cfg.fixed_tbs_index = tbs;
  return cfg;
}

TEST(GrantsFromCapacity, HandInversion) {
  const auto schedule = GrantsFromCapacity(ConstantTrace(2'400'000, 100), Radio());
  ASSERT_EQ(schedule.grants.size(), 100u);
  for (const auto& g : schedule.grants) {
    EXPECT_EQ(g.grant.prb, 9);  // 2400 / 264 = 9.09
    EXPECT_EQ(g.grant.tbs_index, 10);
    EXPECT_EQ(GrantBits(g.grant, TputTable::Default()), 2376u);
  }
  EXPECT_EQ(schedule.clamped_grants, 0u);
  const double bps = Bw3gpp(schedule.grants, Micros{0}, milliseconds{100}, TputTable::Default()).bps;
  EXPECT_NEAR((2.4e6 - bps) / 2.4e6, 0.01, 1e-9);
}

TEST(GrantsFromCapacity, ZeroCapacity) {
  const auto schedule = GrantsFromCapacity(ConstantTrace(0, 50), Radio());
  ASSERT_EQ(schedule.grants.size(), 50u);
  for (const auto& g : schedule.grants) EXPECT_EQ(g.grant.prb, 0);
  EXPECT_EQ(Bw3gpp(schedule.grants, Micros{0}, milliseconds{50}, TputTable::Default()).bps, 0.0);
}

TEST(GrantsFromCapacity, TwoCarriersMatchOneAtDoubleCapacity) {
  // One carrier at 2x vs two carriers each carrying half.
  const double bps = 4'752'000;  // 2 x 2376 bits per ms: exact on both sides
  const auto one = GrantsFromCapacity(ConstantTrace(bps, 100), Radio());
  const auto two = GrantsFromCapacity(ConstantTrace(bps, 100), Radio(10, 2));
  const auto& table = TputTable::Default();
  EXPECT_DOUBLE_EQ(Bw3gpp(one.grants, Micros{0}, milliseconds{100}, table).bps,
                   Bw3gpp(two.grants, Micros{0}, milliseconds{100}, table).bps);
}

TEST(GrantsFromCapacity, PointwiseWithinOneQuantum) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    RandomWalkProfile p;
    p.min_mbps = 1;
    p.max_mbps = 60;
    p.step_mbps = 5;
    p.duration_ms = 2000;
    p.seed = rng();
    const auto trace = GenerateRandomWalk(p);
    const auto cfg = Radio(20, 2);
    const auto schedule = GrantsFromCapacity(trace, cfg);
    for (const auto& g : schedule.grants) {
      const double target = trace.CapacityAt(g.time) / 2 * ToSeconds(g.grant.tti);
      const double quantum = cfg.table.Bits(1, g.grant.tbs_index) * g.grant.mimo_layers;
      const double got = static_cast<double>(GrantBits(g.grant, cfg.table));
      if (g.grant.prb < kMaxPrb) ASSERT_LE(std::abs(got - target), quantum / 2 + 1e-9);
    }
  }
}

TEST(GrantsFromCapacity, ClampsAboveRadioMax) {
  const auto cfg = Radio(0);
  const double max = MaxRadioCapacity(cfg, 0);
  EXPECT_DOUBLE_EQ(max, 273 * 24 * 1000.0);
  const auto schedule = GrantsFromCapacity(ConstantTrace(2 * max, 20), cfg);
  EXPECT_EQ(schedule.clamped_grants, 20u);
  for (const auto& g : schedule.grants) EXPECT_EQ(g.grant.prb, kMaxPrb);
}

TEST(GrantsFromCapacity, RejectsBadCarrier) {
  auto cfg = Radio();
  cfg.carriers[0].mimo_layers = 3;
  EXPECT_THROW(GrantsFromCapacity(ConstantTrace(1e6, 10), cfg), ValidationError);
  cfg = Radio();
  cfg.carriers[0].tti = Micros{250};
  EXPECT_THROW(GrantsFromCapacity(ConstantTrace(1e6, 10), cfg), ValidationError);
}

TEST(GrantedBytesRollup, HundredTtis) {
  std::vector<TimedGrant> grants;
  DciGrant g;
  g.prb = 9;
  g.tbs_index = 10;
  for (int t = 0; t < 100; ++t) grants.push_back({milliseconds{t}, g});
  const auto reports = GrantedBytesRollup(grants, TputTable::Default(), Micros{0}, milliseconds{100});
  ASSERT_EQ(reports.size(), 1u);
  EXPECT_EQ(reports[0].report.bytes_granted, 29'700u);
  EXPECT_EQ(reports[0].report.bytes_used, 29'700u);
}

TEST(GrantedBytesRollup, EmptyWindow) {
  const auto reports =
      GrantedBytesRollup({}, TputTable::Default(), Micros{0}, milliseconds{200});
  ASSERT_EQ(reports.size(), 2u);
  EXPECT_EQ(reports[0].report.bytes_granted, 0u);
  EXPECT_EQ(reports[1].window_start, milliseconds{100});
}

struct Capture {
  std::vector<std::pair<DiagFrame, Micros>> frames;
  std::vector<Micros> releases;
};

Capture RunEmulator(const LinkTrace& trace, BufferPolicy policy, Micros until) {
  Capture cap;
  ModemEmulator modem(trace, Radio(), policy);
  modem.SetReleaseSink([&](std::span<const DiagFrame> frames, Micros at) {
    cap.releases.push_back(at);
    for (const auto& f : frames) cap.frames.emplace_back(f, at);
  });
  for (Micros t{0}; t <= until; t += milliseconds{1}) modem.AdvanceTo(t);
  return cap;
}

std::vector<Micros> CellMeasArrivals(const Capture& cap) {
  std::vector<Micros> out;
  for (const auto& [f, at] : cap.frames) {
    if (f.msg_type == MsgType::kCellMeas) out.push_back(at);
  }
  return out;
}

TEST(ModemEmulator, DrainDeliversCellMeasEveryTenMs) {
  const auto cap = RunEmulator(ConstantTrace(10e6, 1000), BufferPolicy::Drain(), milliseconds{1000});
  const auto arrivals = CellMeasArrivals(cap);
  ASSERT_EQ(arrivals.size(), 100u);
  for (std::size_t i = 1; i < arrivals.size(); ++i) {
    const auto gap = arrivals[i] - arrivals[i - 1];
    EXPECT_GE(gap, milliseconds{10});
    EXPECT_LE(gap, milliseconds{11});
  }
}

TEST(ModemEmulator, BatchReleasesOncePerSecond) {
  const auto cap = RunEmulator(ConstantTrace(10e6, 3000), BufferPolicy::Batch(), milliseconds{3000});
  const auto arrivals = CellMeasArrivals(cap);
  ASSERT_EQ(arrivals.size(), 300u);
  std::vector<Micros> bursts;
  for (auto t : arrivals) {
    if (bursts.empty() || bursts.back() != t) bursts.push_back(t);
  }
  ASSERT_EQ(bursts.size(), 3u);
  EXPECT_EQ(bursts[1] - bursts[0], milliseconds{1000});
  EXPECT_EQ(bursts[2] - bursts[1], milliseconds{1000});
  EXPECT_EQ(std::count(arrivals.begin(), arrivals.end(), bursts[1]), 100);
}

TEST(ModemEmulator, DrainPublishesNothingWhenIdle) {
  // Zero-length activity after the trace ends: no further releases.
  ModemEmulator modem(ConstantTrace(1e6, 5), Radio(), BufferPolicy::Drain());
  int calls = 0;
  modem.SetReleaseSink([&](std::span<const DiagFrame> frames, Micros) {
    EXPECT_FALSE(frames.empty());
    ++calls;
  });
  modem.AdvanceTo(milliseconds{5});
  const int after_trace = calls;
  modem.AdvanceTo(milliseconds{100});
  EXPECT_EQ(calls, after_trace);
  EXPECT_EQ(modem.NextEventTime(), Micros::max());
  EXPECT_EQ(modem.buffered(), 0u);
}

TEST(ModemEmulator, ReleasedFramesEncodeAndDecode) {
  ModemEmulator modem(ConstantTrace(8e6, 500), Radio(), BufferPolicy::Drain());
  std::vector<DiagFrame> released;
  std::vector<std::uint8_t> wire;
  modem.SetReleaseSink([&](std::span<const DiagFrame> frames, Micros) {
    for (const auto& f : frames) {
      released.push_back(f);
      AppendEncodedFrame(f, wire);
    }
  });
  modem.AdvanceTo(milliseconds{600});
  FrameDecoder decoder;
  EXPECT_EQ(decoder.Feed(wire), released);
  EXPECT_EQ(decoder.diagnostics().errors(), 0u);
  EXPECT_EQ(modem.frames_released(), released.size());
  EXPECT_EQ(modem.frames_generated(), released.size());
}

TEST(ModemEmulator, ReportsMatchRollupOfGrantSink) {
  RandomWalkProfile p;
  p.min_mbps = 5;
  p.max_mbps = 50;
  p.step_mbps = 3;
  p.duration_ms = 1000;
  p.seed = 17;
  const auto trace = GenerateRandomWalk(p);
  ModemEmulator modem(trace, Radio(15), BufferPolicy::Drain());
  std::vector<TimedGrant> grants;
  std::vector<GrantedBytesReport> reports;
  modem.SetGrantSink([&](const TimedGrant& g) { grants.push_back(g); });
  modem.SetReleaseSink([&](std::span<const DiagFrame> frames, Micros) {
    for (const auto& f : frames) {
      if (auto r = ParseGrantedBytes(f)) reports.push_back(*r);
    }
  });
  modem.AdvanceTo(seconds{2});
  const auto expected =
      GrantedBytesRollup(grants, modem.config().table, Micros{0}, trace.duration());
  ASSERT_EQ(reports.size(), expected.size());
  for (std::size_t i = 0; i < reports.size(); ++i) EXPECT_EQ(reports[i], expected[i].report);
}

TEST(ModemEmulator, SameSeedSameStream) {
  auto cfg = Radio();
  cfg.grant_noise = 0.1;
  cfg.tbs_variation = TbsVariation{};
  auto run = [&](std::uint64_t seed) {
    ModemEmulator modem(ConstantTrace(20e6, 300), cfg, BufferPolicy::Drain(), seed);
    std::vector<DiagFrame> out;
    modem.SetReleaseSink([&](std::span<const DiagFrame> frames, Micros) {
      out.insert(out.end(), frames.begin(), frames.end());
    });
    modem.AdvanceTo(seconds{1});
    return out;
  };
  EXPECT_EQ(run(5), run(5));
  EXPECT_NE(run(5), run(6));
}

}  // namespace
}  // namespace kpicc
