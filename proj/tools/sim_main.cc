// sim: command-line front end for the simulator and the studies.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "kpicc/error.h"
#include "kpicc/frame_decoder.h"
#include "kpicc/link_trace.h"
#include "kpicc/metrics.h"
#include "kpicc/modem_emulator.h"
#include "kpicc/netsim.h"
#include "kpicc/scenario_config.h"
#include "kpicc/study.h"

namespace fs = std::filesystem;
using namespace kpicc;

namespace {

int CmdRun(const std::string& scenario_path, const std::string& events_path, double warmup_s) {
  const Scenario scenario = LoadScenario(scenario_path);
  const SimResult result = Run(scenario);
  if (!events_path.empty()) {
    std::ofstream out(events_path, std::ios::binary);
    if (!out) throw Error(fmt::format("cannot write '{}'", events_path));
    result.log.Write(out);
  }
  std::vector<std::string> names;
  for (const auto& f : scenario.flows) names.push_back(f.cca);
  const auto report =
      ComputeReport(result.log, names, seconds{1}, Micros{std::llround(warmup_s * 1e6)});
  fmt::print("{:>4}  {:<9} {:>10} {:>10} {:>10} {:>10} {:>10}\n", "flow", "cca", "mbit/s", "mean_ms",
             "p50_ms", "p95_ms", "drops_B");
  auto row = [](const FlowMetrics& f, const std::string& id) {
    fmt::print("{:>4}  {:<9} {:>10.3f} {:>10.2f} {:>10.2f} {:>10.2f} {:>10}\n", id, f.cca,
               f.throughput_bps / 1e6, f.delay.mean_ms, f.delay.at(50), f.delay.at(95), f.dropped_bytes);
  };
  for (const auto& f : report.flows) row(f, std::to_string(f.flow));
  if (report.flows.size() > 1) {
    row(report.aggregate, "all");
    if (report.jain) fmt::print("jain {:.4f}\n", *report.jain);
  }
  fmt::print("events {}  kpi frames {}  clamped grants {}\n", result.events_processed,
             result.kpi_frames_decoded, result.clamped_grants);
  return 0;
}

int CmdStudy(const std::string& name, const std::string& config_path, const std::string& out_dir,
             std::optional<std::uint64_t> seed, std::optional<unsigned> threads) {
  if (!IsKnownStudy(name)) throw UsageError(fmt::format("unknown study '{}'", name));
  StudyConfig config = LoadStudyConfig(config_path);
  if (threads) config.threads = *threads;
  const StudyOutput output = RunStudy(name, config, seed);
  WriteStudyOutput(output, out_dir);
  fmt::print("wrote {} and {}\n", (fs::path(out_dir) / "summary.csv").string(),
             (fs::path(out_dir) / "report.json").string());
  return 0;
}

int CmdGenTrace(const RandomWalkProfile& profile, const std::string& out_path) {
  const LinkTrace trace = GenerateRandomWalk(profile);
  if (out_path.empty() || out_path == "-") {
    WriteTraceCsv(trace, std::cout);
  } else {
    SaveTraceCsv(trace, out_path);
  }
  return 0;
}

int CmdDiagGen(const std::string& scenario_path, const std::string& out_path) {
  const Scenario s = LoadScenario(scenario_path);
  if (s.trace.duration() <= Micros{0}) throw ValidationError("scenario trace has zero duration");
  ModemEmulator modem(s.trace, s.radio, s.kpi.policy, s.seed);
  std::vector<std::uint8_t> bytes;
  modem.SetReleaseSink([&](std::span<const DiagFrame> frames, Micros) {
    for (const auto& f : frames) AppendEncodedFrame(f, bytes);
  });
  while (modem.NextEventTime() != Micros::max()) modem.AdvanceTo(modem.NextEventTime());
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write '{}'", out_path));
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  fmt::print(stderr, "{} frames, {} bytes\n", modem.frames_released(), bytes.size());
  return 0;
}

std::string Describe(const DiagFrame& f) {
  if (auto g = ParseDciGrant(f)) {
    return fmt::format("dci carrier={} dir={} prb={} tbs={} mimo={} tti_us={}", g->carrier_id,
                       g->direction == Direction::kUplink ? "ul" : "dl", g->prb, g->tbs_index,
                       g->mimo_layers, g->tti.count());
  }
  if (auto r = ParseGrantedBytes(f)) {
    return fmt::format("granted_bytes window_us={} granted={} used={}", r->window.count(),
                       r->bytes_granted, r->bytes_used);
  }
  if (auto m = ParseCellMeas(f)) {
    return fmt::format("cell_meas rsrp_dbm={:.2f} cell={}", m->rsrp_centi_dbm / 100.0, m->cell_id);
  }
  return fmt::format("type=0x{:04x} len={}", static_cast<unsigned>(f.msg_type), f.payload.size());
}

int CmdDiagDump(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot open '{}'", path));
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  FrameDecoder decoder;
  for (const auto& f : decoder.Feed(bytes)) fmt::print("{} {}\n", f.timestamp_us, Describe(f));
  const auto& d = decoder.diagnostics();
  fmt::print(stderr, "frames={} crc_errors={} unknown_type={} bad_header={} skipped_bytes={}\n",
             d.frames, d.crc_errors, d.unknown_type, d.bad_header, d.skipped_bytes);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trace-driven cellular congestion-control simulator"};
  app.require_subcommand(1);

  std::string scenario_path, events_path;
  double warmup_s = 0.0;
  auto* run = app.add_subcommand("run", "Run one scenario and print per-flow metrics");
  run->add_option("--scenario", scenario_path, "Scenario YAML file")->required()->check(CLI::ExistingFile);
  run->add_option("--events", events_path, "Write the event log here");
  run->add_option("--warmup", warmup_s, "Seconds excluded from the metrics");

  std::string study_name, config_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  auto* study = app.add_subcommand("study", "Run a named study and write summary.csv/report.json");
  study->add_option("name", study_name, "compare|sweep|multiflow|fallback|correlate|granularity")
      ->required();
  study->add_option("--config", config_path, "Study YAML file")->required()->check(CLI::ExistingFile);
  study->add_option("--out", out_dir, "Output directory")->required();
  study->add_option("--seed", seed, "Base seed (overrides the config)");
  study->add_option("--threads", threads, "Worker threads (0 = all cores)");

  RandomWalkProfile profile;
  std::string trace_profile = "random-walk", trace_out;
  double duration_s = 60.0;
  auto* gen = app.add_subcommand("gen-trace", "Write a synthetic capacity trace as CSV");
  gen->add_option("--profile", trace_profile, "Trace profile")->check(CLI::IsMember({"random-walk"}));
  gen->add_option("--min-mbps", profile.min_mbps, "Lower bound")->capture_default_str();
  gen->add_option("--max-mbps", profile.max_mbps, "Upper bound")->capture_default_str();
  gen->add_option("--step", profile.step_mbps, "Largest change per interval (Mbit/s)")->capture_default_str();
  gen->add_option("--duration", duration_s, "Length in seconds")->capture_default_str();
  gen->add_option("--interval-ms", profile.interval_ms, "Sample spacing")->capture_default_str();
  gen->add_option("--seed", profile.seed, "RNG seed")->capture_default_str();
  gen->add_option("-o,--out", trace_out, "Output file (default stdout)");

  auto* diag = app.add_subcommand("diag", "Diagnostic-stream utilities");
  diag->require_subcommand(1);
  std::string dump_path;
  auto* dump = diag->add_subcommand("dump", "Decode a binary diagnostic stream");
  dump->add_option("file", dump_path, "Stream file")->required()->check(CLI::ExistingFile);
  std::string diag_scenario, diag_out;
  auto* dgen = diag->add_subcommand("gen", "Emit the modem's diagnostic stream for a scenario");
  dgen->add_option("--scenario", diag_scenario, "Scenario YAML file")->required()->check(CLI::ExistingFile);
  dgen->add_option("-o,--out", diag_out, "Output file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return CmdRun(scenario_path, events_path, warmup_s);
    if (*study) return CmdStudy(study_name, config_path, out_dir, seed, threads);
    if (*gen) {
      profile.duration_ms = std::llround(duration_s * 1000.0);
      return CmdGenTrace(profile, trace_out);
    }
    if (*dump) return CmdDiagDump(dump_path);
    if (*dgen) return CmdDiagGen(diag_scenario, diag_out);
  } catch (const UsageError& e) {
    fmt::print(stderr, "usage error: {}\n", e.what());
    return 2;
  } catch (const ValidationError& e) {
    fmt::print(stderr, "invalid input: {}\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
