#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "kpicc/error.h"
#include "kpicc/scenario_config.h"

namespace kpicc {
namespace {

namespace fs = std::filesystem;

const fs::path kConfigs = KPICC_CONFIG_DIR;

TEST(ScenarioConfig, FullScenario) {
  const auto s = ParseScenario(R"(
seed: 9
duration_ms: 5000
mss: 1200
trace:
  constant: {mbps: 12, duration_ms: 8000}
radio:
  direction: downlink
  carriers:
    - {mimo: 2, tti_us: 500}
    - {mimo: 1, tti_us: 1000}
  tbs_index: 14
  tbs_variation: {min: 4, max: 20, period_ms: 30}
  grant_noise: 0.05
  cell_id: 3
wired:
  propagation_delay_ms: 25
  buffer_bytes: 500000
  schedule:
    - {at_ms: 0, mbps: 100}
    - {at_ms: 2000, mbps: 5}
cellular_buffer_bytes: 200000
kpi: {method: granted-bytes, interval_ms: 100, policy: batch, policy_period_ms: 500}
flows:
  - {cca: biscay}
  - {cca: cubic, start_ms: 1000, duration_ms: 2000, protocol: udp}
biscay: {startup_samples: 5, stale_intervals: 20, hysteresis: 0.2, streak: 4}
)");
  EXPECT_EQ(s.seed, 9u);
  EXPECT_EQ(s.EffectiveDuration(), seconds{5});
  EXPECT_EQ(s.mss, 1200u);
  EXPECT_EQ(s.trace.duration(), seconds{8});
  EXPECT_DOUBLE_EQ(s.trace.CapacityAt(seconds{1}), 12e6);
  EXPECT_EQ(s.radio.direction, Direction::kDownlink);
  EXPECT_EQ(s.radio.table.direction(), Direction::kDownlink);
  ASSERT_EQ(s.radio.carriers.size(), 2u);
  EXPECT_EQ(s.radio.carriers[0].mimo_layers, 2);
  EXPECT_EQ(s.radio.carriers[0].tti, kTti5g);
  EXPECT_EQ(s.radio.fixed_tbs_index, 14);
  ASSERT_TRUE(s.radio.tbs_variation);
  EXPECT_EQ(s.radio.tbs_variation->period, milliseconds{30});
  EXPECT_DOUBLE_EQ(s.radio.grant_noise, 0.05);
  EXPECT_EQ(s.radio.cell_id, 3);
  EXPECT_EQ(s.wired.propagation_delay, milliseconds{25});
  ASSERT_EQ(s.wired.capacity_schedule.size(), 2u);
  EXPECT_EQ(s.wired.capacity_schedule[1].first, seconds{2});
  EXPECT_DOUBLE_EQ(s.wired.capacity_schedule[1].second, 5e6);
  EXPECT_EQ(s.cellular_buffer_bytes, 200'000u);
  EXPECT_EQ(s.kpi.method, KpiMethod::kGrantedBytes);
  EXPECT_EQ(s.kpi.interval, milliseconds{100});
  EXPECT_EQ(s.kpi.policy.mode, BufferPolicy::Mode::kBatch);
  EXPECT_EQ(s.kpi.policy.period, milliseconds{500});
  ASSERT_EQ(s.flows.size(), 2u);
  EXPECT_EQ(s.flows[1].cca, "cubic");
  EXPECT_EQ(s.flows[1].start, seconds{1});
  EXPECT_EQ(s.flows[1].duration, seconds{2});
  EXPECT_EQ(s.flows[1].protocol, Protocol::kUdp);
  EXPECT_EQ(s.biscay.startup_valid_samples, 5);
  EXPECT_EQ(s.biscay.stale_intervals, 20);
  EXPECT_DOUBLE_EQ(s.biscay.detector.hysteresis, 0.2);
  EXPECT_EQ(s.biscay.detector.streak, 4);
}

TEST(ScenarioConfig, InlineSamplesAndDefaults) {
  const auto s = ParseScenario("trace:\n  samples: [[0, 1000000], [500, 2000000]]\n");
  EXPECT_EQ(s.trace.samples().size(), 2u);
  EXPECT_EQ(s.trace.duration(), milliseconds{500});
  ASSERT_EQ(s.flows.size(), 1u);
  EXPECT_EQ(s.flows[0].cca, "biscay");
  EXPECT_EQ(s.kpi.interval, milliseconds{10});
}

TEST(ScenarioConfig, TraceFileRelativeToConfig) {
  const fs::path dir = fs::temp_directory_path() / "kpicc_scenario_config_test";
  fs::create_directories(dir);
  {
    std::ofstream(dir / "trace.csv") << "time_ms,capacity_bps\n0,5000000\n1000,6000000\n";
    std::ofstream(dir / "s.yaml") << "trace: {file: trace.csv}\n";
  }
  const auto s = LoadScenario(dir / "s.yaml");
  EXPECT_EQ(s.trace.duration(), seconds{1});
  EXPECT_DOUBLE_EQ(s.trace.CapacityAt(milliseconds{1000}), 6e6);
  fs::remove_all(dir);
}

TEST(ScenarioConfig, Errors) {
  EXPECT_THROW(ParseScenario("radio: {tbs_index: 3}\n"), ValidationError);  // no trace
  EXPECT_THROW(ParseScenario("trace: {constant: {mbps: 1, duration_ms: 10}}\nbogus: 1\n"),
               ValidationError);
  EXPECT_THROW(ParseScenario("trace: {constant: {mbps: 1, duration_ms: 10}, samples: [[0, 1]]}\n"),
               ValidationError);
  EXPECT_THROW(ParseScenario("trace: {constant: {mbps: 1, duration_ms: 10}}\nkpi: {method: rssi}\n"),
               ValidationError);
  EXPECT_THROW(ParseScenario("trace: {constant: {mbps: 1, duration_ms: 10}}\nwired: {mbps: 1, "
                             "schedule: [{at_ms: 0, mbps: 1}]}\n"),
               ValidationError);
  EXPECT_THROW(ParseScenario("trace: [unclosed\n"), ValidationError);
  EXPECT_THROW(LoadScenario(kConfigs / "does_not_exist.yaml"), ValidationError);
  try {
    ParseScenario("trace: {constant: {mbps: 1, duration_ms: 10}}\nflows: [{cca: biscay, colour: red}]\n");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("colour"), std::string::npos);
  }
}

TEST(StudyConfig, ShippedConfigsParse) {
  for (const char* name : {"compare", "sweep", "multiflow", "fallback", "correlate", "granularity"}) {
    SCOPED_TRACE(name);
    const auto c = LoadStudyConfig(kConfigs / (std::string(name) + ".yaml"));
    EXPECT_GT(c.scenario.trace.duration(), Micros{0});
    EXPECT_FALSE(c.ccas.empty());
  }
  EXPECT_NO_THROW(LoadScenario(kConfigs / "scenario_basic.yaml"));
}

TEST(StudyConfig, Fields) {
  const auto c = LoadStudyConfig(kConfigs / "sweep.yaml");
  EXPECT_EQ(c.runs, 3);
  EXPECT_EQ(c.ccas, std::vector<std::string>{"biscay"});
  const std::vector<Micros> intervals = {milliseconds{1}, milliseconds{10}, milliseconds{100},
                                         milliseconds{1000}, milliseconds{1500}};
  EXPECT_EQ(c.intervals, intervals);
  EXPECT_EQ(c.warmup, seconds{2});
  ASSERT_TRUE(c.random_walk);
  EXPECT_EQ(c.random_walk->seed, 200u);
  EXPECT_THROW(ParseStudyConfig("runs: 2\n"), ValidationError);
  EXPECT_THROW(ParseStudyConfig("scenario: {trace: {constant: {mbps: 1, duration_ms: 10}}}\n"
                                "ccas: [vegas]\n"),
               ValidationError);
  EXPECT_THROW(ParseStudyConfig("scenario: {trace: {constant: {mbps: 1, duration_ms: 10}}}\n"
                                "runs: 0\n"),
               ValidationError);
}

}  // namespace
}  // namespace kpicc
