#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kpicc/link_trace.h"
#include "kpicc/netsim.h"
#include "kpicc/units.h"

namespace kpicc {

// Scenario files are YAML. Relative paths inside a file (trace.file,
// radio.table) resolve against `base_dir`. Every error is a ValidationError
// naming the offending key.
Scenario ParseScenario(std::string_view yaml, const std::filesystem::path& base_dir = {});
Scenario LoadScenario(const std::filesystem::path& path);

struct StudyConfig {
  Scenario scenario;
  // Set when the trace is a generated random walk; studies that repeat over
  // seeds regenerate it with profile.seed + run index.
  std::optional<RandomWalkProfile> random_walk;

  std::vector<std::string> ccas{"biscay", "bbr-lite", "cubic"};
  int runs = 1;
  std::vector<Micros> intervals{milliseconds{1}, milliseconds{10}, milliseconds{100},
                                milliseconds{1000}, milliseconds{1500}};
  int flows = 3;
  Micros warmup{0};
  Micros measure_window = milliseconds{100};
  Micros jain_window = seconds{1};
  // correlate: comparison window and the TBS range the radio varies over.
  Micros correlate_window = milliseconds{100};
  // Worker threads for independent runs; 0 picks the hardware count.
  unsigned threads = 0;
};

// A study file holds the base scenario under `scenario:` plus study knobs
// at the top level.
StudyConfig ParseStudyConfig(std::string_view yaml, const std::filesystem::path& base_dir = {});
StudyConfig LoadStudyConfig(const std::filesystem::path& path);

}  // namespace kpicc
