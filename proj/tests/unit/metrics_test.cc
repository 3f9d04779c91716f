#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "kpicc/measure.h"
#include "kpicc/metrics.h"

namespace kpicc {
namespace {

TEST(Jain, Examples) {
  EXPECT_DOUBLE_EQ(*JainIndex(std::vector<double>{4, 4, 4}), 1.0);
  for (double x : {0.1, 7.0, 1e9}) EXPECT_DOUBLE_EQ(*JainIndex(std::vector<double>{x, 0}), 0.5);
  // (6+3+3)^2 / (3 * (36+9+9)) = 144 / 162
  EXPECT_NEAR(*JainIndex(std::vector<double>{6, 3, 3}), 144.0 / 162.0, 1e-15);
  EXPECT_NEAR(*JainIndex(std::vector<double>{6, 3, 3}), 0.8889, 1e-4);
}

TEST(Jain, Undefined) {
  EXPECT_FALSE(JainIndex(std::vector<double>{}));
  EXPECT_FALSE(JainIndex(std::vector<double>{0, 0, 0}));
}

TEST(Jain, BoundsOnRandomInput) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(0, 100);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> x(1 + rng() % 8);
    for (auto& v : x) v = d(rng);
    const double j = *JainIndex(x);
    EXPECT_GE(j, 1.0 / static_cast<double>(x.size()) - 1e-12);
    EXPECT_LE(j, 1.0 + 1e-12);
  }
}

TEST(Jain, Windowed) {
  const std::vector<std::vector<double>> rates = {{1, 0, 6}, {1, 0, 3}, {1, 0, 3}};
  const auto j = WindowedJain(rates);
  ASSERT_EQ(j.size(), 3u);
  EXPECT_DOUBLE_EQ(*j[0], 1.0);
  EXPECT_FALSE(j[1]);
  EXPECT_NEAR(*j[2], 144.0 / 162.0, 1e-15);
}

TEST(Percentile, NearestRank) {
  std::vector<double> v;
  for (int i = 100; i >= 1; --i) v.push_back(i);
  EXPECT_DOUBLE_EQ(*Percentile(v, 50), 50);
  EXPECT_DOUBLE_EQ(*Percentile(v, 95), 95);
  EXPECT_DOUBLE_EQ(*Percentile(v, 100), 100);
  EXPECT_DOUBLE_EQ(*Percentile(v, 0), 1);
  EXPECT_DOUBLE_EQ(*Percentile({3, 1, 2}, 50), 2);
  EXPECT_FALSE(Percentile({}, 50));
}

TEST(DelayStats, MeanAndPercentiles) {
  std::vector<Micros> d;
  for (int i = 1; i <= 10; ++i) d.push_back(milliseconds{i * 10});
  const auto s = ComputeDelayStats(d);
  EXPECT_EQ(s.samples, 10u);
  EXPECT_DOUBLE_EQ(s.mean_ms, 55.0);
  EXPECT_DOUBLE_EQ(s.at(10), 10.0);
  EXPECT_DOUBLE_EQ(s.at(50), 50.0);
  EXPECT_DOUBLE_EQ(s.at(99), 100.0);
}

EventLog SyntheticLog() {
  EventLog log;
  log.Append({Micros{0}, LogKind::kFlowStart, 0});
  log.Append({Micros{0}, LogKind::kSend, 0, 0, 1500});
  log.Append({milliseconds{1}, LogKind::kSend, 0, 1, 1500});
  log.Append({milliseconds{2}, LogKind::kSend, 0, 2, 1500});
  log.Append({milliseconds{3}, LogKind::kDrop, 0, 2, 1500, 1});
  log.Append({milliseconds{42}, LogKind::kDeliver, 0, 0, 1500, 0});
  log.Append({milliseconds{84}, LogKind::kAck, 0, 0, 1500, 84'000, 11});
  log.Append({milliseconds{150}, LogKind::kDeliver, 0, 1, 1500, 1000});
  log.Append({milliseconds{200}, LogKind::kLoss, 0, 2, 1500});
  log.set_end_time(milliseconds{200});
  return log;
}

TEST(Measure, OneWayDelay) {
  const auto m = Measure(SyntheticLog());
  const auto& f = m.flows.at(0);
  ASSERT_EQ(f.one_way_delay.size(), 2u);
  EXPECT_EQ(f.one_way_delay[0], milliseconds{42});
  EXPECT_EQ(f.one_way_delay[1], milliseconds{149});
  EXPECT_EQ(f.rtt, std::vector<Micros>{milliseconds{84}});
  EXPECT_EQ(f.lost_packets, 1u);
}

TEST(Measure, WindowedThroughput) {
  const auto m = Measure(SyntheticLog(), milliseconds{100});
  const auto& f = m.flows.at(0);
  ASSERT_EQ(f.throughput_bps.size(), 2u);
  EXPECT_DOUBLE_EQ(f.throughput_bps[0], 1500 * 8 / 0.1);
  EXPECT_DOUBLE_EQ(f.throughput_bps[1], 1500 * 8 / 0.1);
}

TEST(Measure, Conservation) {
  const auto m = Measure(SyntheticLog());
  const auto& f = m.flows.at(0);
  EXPECT_EQ(f.sent_bytes, 4500u);
  EXPECT_EQ(f.delivered_bytes, 3000u);
  EXPECT_EQ(f.dropped_bytes, 1500u);
  EXPECT_EQ(f.in_flight_bytes(), 0u);
}

TEST(Measure, EmptyLog) {
  const auto m = Measure(EventLog{});
  EXPECT_TRUE(m.flows.empty());
  EXPECT_EQ(m.sent_bytes(), 0u);
}

TEST(FlowMetrics, PowerIsRateOverDelay) {
  const auto m = Measure(SyntheticLog());
  const auto fm = ComputeFlowMetrics(m.flows.at(0));
  EXPECT_DOUBLE_EQ(fm.throughput_bps, 3000 * 8 / 0.2);
  EXPECT_DOUBLE_EQ(fm.delay.mean_ms, (42 + 149) / 2.0);
  EXPECT_DOUBLE_EQ(fm.power, fm.throughput_bps / (fm.delay.mean_ms / 1000.0));
}

TEST(Report, EqualFlowsAreFair) {
  EventLog log;
  for (std::uint32_t f = 0; f < 3; ++f) log.Append({Micros{0}, LogKind::kFlowStart, f});
  std::uint64_t seq = 0;
  for (int ms = 1; ms < 4000; ++ms) {
    for (std::uint32_t f = 0; f < 3; ++f) {
      log.Append({milliseconds{ms}, LogKind::kDeliver, f, seq++, 1000, (ms - 1) * 1000});
    }
  }
  log.set_end_time(seconds{4});
  const auto r = ComputeReport(log, {"a", "b", "c"}, seconds{1}, seconds{1});
  ASSERT_EQ(r.flows.size(), 3u);
  EXPECT_EQ(r.flows[1].cca, "b");
  EXPECT_NEAR(*r.jain, 1.0, 1e-9);
  ASSERT_EQ(r.jain_windows.size(), 3u);
  for (const auto& j : r.jain_windows) EXPECT_NEAR(*j, 1.0, 1e-9);
  EXPECT_NEAR(r.aggregate.delay.mean_ms, 1.0, 1e-9);
}

}  // namespace
}  // namespace kpicc
