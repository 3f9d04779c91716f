#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "kpicc/scenario_config.h"

namespace kpicc {

inline constexpr std::string_view kStudyNames[] = {"compare",  "sweep",     "multiflow",
                                                   "fallback", "correlate", "granularity"};

bool IsKnownStudy(std::string_view name);

struct StudyOutput {
  std::string name;
  std::string summary_csv;
  std::string report_json;
};

// Runs every configuration of the named study. Throws UsageError for an
// unknown name and ValidationError for a bad config, before any run starts.
// `seed` replaces the config's base seed. Output is a pure function of the
// arguments, independent of the thread count.
StudyOutput RunStudy(std::string_view name, const StudyConfig& config,
                     std::optional<std::uint64_t> seed = std::nullopt);

// Creates `dir` if needed and writes summary.csv and report.json.
void WriteStudyOutput(const StudyOutput& output, const std::filesystem::path& dir);

}  // namespace kpicc
