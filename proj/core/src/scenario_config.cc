#include "kpicc/scenario_config.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "kpicc/cca.h"
#include "kpicc/error.h"
#include "kpicc/tput_table.h"

namespace kpicc {
namespace {

namespace fs = std::filesystem;

std::string Join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

void CheckKeys(const YAML::Node& node, const std::string& where,
               std::initializer_list<std::string_view> allowed) {
  if (!node.IsMap()) throw ValidationError(fmt::format("{}: expected a mapping", where));
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ValidationError(fmt::format("{}: unknown key '{}'", where.empty() ? "config" : where, key));
    }
  }
}

template <typename T>
T Get(const YAML::Node& node, const std::string& where) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ValidationError(fmt::format("{}: bad value '{}'", where, YAML::Dump(node)));
  }
}

template <typename T>
void Read(const YAML::Node& parent, const std::string& prefix, const char* key, T& out) {
  if (const auto node = parent[key]) out = Get<T>(node, Join(prefix, key));
}

void ReadMillis(const YAML::Node& parent, const std::string& prefix, const char* key, Micros& out) {
  if (const auto node = parent[key]) {
    out = Micros{std::llround(Get<double>(node, Join(prefix, key)) * 1000.0)};
  }
}

fs::path Resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

RandomWalkProfile ParseRandomWalk(const YAML::Node& n, const std::string& where) {
  CheckKeys(n, where, {"min_mbps", "max_mbps", "step_mbps", "interval_ms", "duration_ms", "seed"});
  RandomWalkProfile p;
  Read(n, where, "min_mbps", p.min_mbps);
  Read(n, where, "max_mbps", p.max_mbps);
  Read(n, where, "step_mbps", p.step_mbps);
  Read(n, where, "interval_ms", p.interval_ms);
  Read(n, where, "duration_ms", p.duration_ms);
  Read(n, where, "seed", p.seed);
  return p;
}

LinkTrace ParseTrace(const YAML::Node& n, const fs::path& base,
                     std::optional<RandomWalkProfile>& walk) {
  const std::string where = "trace";
  CheckKeys(n, where, {"file", "random_walk", "constant", "samples"});
  const int kinds = (n["file"] ? 1 : 0) + (n["random_walk"] ? 1 : 0) + (n["constant"] ? 1 : 0) +
                    (n["samples"] ? 1 : 0);
  if (kinds != 1) {
    throw ValidationError("trace: exactly one of file, random_walk, constant, samples is required");
  }
  if (n["file"]) return LoadTraceCsv(Resolve(base, Get<std::string>(n["file"], "trace.file")));
  if (n["random_walk"]) {
    walk = ParseRandomWalk(n["random_walk"], "trace.random_walk");
    return GenerateRandomWalk(*walk);
  }
  if (n["constant"]) {
    const auto c = n["constant"];
    CheckKeys(c, "trace.constant", {"mbps", "duration_ms"});
    double mbps = 0.0;
    std::int64_t duration_ms = 0;
    Read(c, "trace.constant", "mbps", mbps);
    Read(c, "trace.constant", "duration_ms", duration_ms);
    return ConstantTrace(mbps * 1e6, duration_ms);
  }
  // Inline [[time_ms, capacity_bps], ...].
  std::vector<TraceSample> samples;
  for (const auto& s : n["samples"]) {
    if (!s.IsSequence() || s.size() != 2) {
      throw ValidationError("trace.samples: each entry must be [time_ms, capacity_bps]");
    }
    samples.push_back(TraceSample{Get<std::int64_t>(s[0], "trace.samples"),
                                  Get<double>(s[1], "trace.samples")});
  }
  return LinkTrace(std::move(samples));
}

Direction ParseDirection(const YAML::Node& n, const std::string& where) {
  const auto s = Get<std::string>(n, where);
  if (s == "uplink") return Direction::kUplink;
  if (s == "downlink") return Direction::kDownlink;
  throw ValidationError(fmt::format("{}: expected uplink or downlink, got '{}'", where, s));
}

RadioConfig ParseRadio(const YAML::Node& n, const fs::path& base) {
  const std::string where = "radio";
  CheckKeys(n, where,
            {"direction", "carriers", "tbs_index", "tbs_variation", "grant_noise", "cell_id", "table"});
  RadioConfig r;
  if (n["direction"]) r.direction = ParseDirection(n["direction"], "radio.direction");
  if (const auto cs = n["carriers"]) {
    r.carriers.clear();
    for (const auto& c : cs) {
      CheckKeys(c, "radio.carriers", {"mimo", "tti_us"});
      CarrierConfig cc;
      int mimo = cc.mimo_layers;
      Read(c, "radio.carriers", "mimo", mimo);
      if (mimo < 1 || mimo > 255) throw ValidationError("radio.carriers.mimo out of range");
      cc.mimo_layers = static_cast<std::uint8_t>(mimo);
      std::int64_t tti_us = cc.tti.count();
      Read(c, "radio.carriers", "tti_us", tti_us);
      cc.tti = Micros{tti_us};
      r.carriers.push_back(cc);
    }
  }
  if (n["tbs_index"]) {
    const int tbs = Get<int>(n["tbs_index"], "radio.tbs_index");
    if (tbs < 0 || tbs > 255) throw ValidationError("radio.tbs_index out of range");
    r.fixed_tbs_index = static_cast<std::uint8_t>(tbs);
  }
  if (const auto v = n["tbs_variation"]) {
    CheckKeys(v, "radio.tbs_variation", {"min", "max", "period_ms"});
    TbsVariation tv;
    int lo = tv.min_index;
    int hi = tv.max_index;
    Read(v, "radio.tbs_variation", "min", lo);
    Read(v, "radio.tbs_variation", "max", hi);
    if (lo < 0 || hi > 255 || lo > hi) throw ValidationError("radio.tbs_variation: bad range");
    tv.min_index = static_cast<std::uint8_t>(lo);
    tv.max_index = static_cast<std::uint8_t>(hi);
    ReadMillis(v, "radio.tbs_variation", "period_ms", tv.period);
    r.tbs_variation = tv;
  }
  Read(n, where, "grant_noise", r.grant_noise);
  if (n["cell_id"]) r.cell_id = static_cast<std::uint16_t>(Get<unsigned>(n["cell_id"], "radio.cell_id"));
  if (n["table"]) {
    r.table = TputTable::Load(Resolve(base, Get<std::string>(n["table"], "radio.table")), r.direction);
  } else {
    r.table = TputTable::Default(r.direction);
  }
  return r;
}

WiredConfig ParseWired(const YAML::Node& n) {
  const std::string where = "wired";
  CheckKeys(n, where, {"propagation_delay_ms", "buffer_bytes", "mbps", "schedule"});
  WiredConfig w;
  ReadMillis(n, where, "propagation_delay_ms", w.propagation_delay);
  Read(n, where, "buffer_bytes", w.buffer_bytes);
  if (n["mbps"] && n["schedule"]) throw ValidationError("wired: give either mbps or schedule");
  if (n["mbps"]) w.capacity_schedule = {{Micros{0}, Get<double>(n["mbps"], "wired.mbps") * 1e6}};
  if (const auto s = n["schedule"]) {
    w.capacity_schedule.clear();
    for (const auto& step : s) {
      CheckKeys(step, "wired.schedule", {"at_ms", "mbps"});
      Micros at{0};
      double mbps = 0.0;
      ReadMillis(step, "wired.schedule", "at_ms", at);
      Read(step, "wired.schedule", "mbps", mbps);
      w.capacity_schedule.emplace_back(at, mbps * 1e6);
    }
  }
  return w;
}

KpiConfig ParseKpi(const YAML::Node& n) {
  const std::string where = "kpi";
  CheckKeys(n, where, {"method", "interval_ms", "policy", "policy_period_ms"});
  KpiConfig k;
  if (n["method"]) {
    const auto m = Get<std::string>(n["method"], "kpi.method");
    if (m == "gpp3") {
      k.method = KpiMethod::kGpp3;
    } else if (m == "granted-bytes") {
      k.method = KpiMethod::kGrantedBytes;
    } else {
      throw ValidationError(fmt::format("kpi.method: expected gpp3 or granted-bytes, got '{}'", m));
    }
  }
  ReadMillis(n, where, "interval_ms", k.interval);
  if (n["policy"]) {
    const auto p = Get<std::string>(n["policy"], "kpi.policy");
    if (p == "drain") {
      k.policy = BufferPolicy::Drain();
    } else if (p == "batch") {
      k.policy = BufferPolicy::Batch();
    } else {
      throw ValidationError(fmt::format("kpi.policy: expected drain or batch, got '{}'", p));
    }
  }
  ReadMillis(n, where, "policy_period_ms", k.policy.period);
  return k;
}

Protocol ParseProtocol(const YAML::Node& n) {
  const auto s = Get<std::string>(n, "flows.protocol");
  if (s == "tcp") return Protocol::kTcp;
  if (s == "udp") return Protocol::kUdp;
  throw ValidationError(fmt::format("flows.protocol: expected tcp or udp, got '{}'", s));
}

std::vector<FlowSpec> ParseFlows(const YAML::Node& n) {
  if (!n.IsSequence()) throw ValidationError("flows: expected a list");
  std::vector<FlowSpec> flows;
  for (const auto& f : n) {
    CheckKeys(f, "flows", {"cca", "start_ms", "duration_ms", "protocol"});
    FlowSpec spec;
    Read(f, "flows", "cca", spec.cca);
    ReadMillis(f, "flows", "start_ms", spec.start);
    ReadMillis(f, "flows", "duration_ms", spec.duration);
    if (f["protocol"]) spec.protocol = ParseProtocol(f["protocol"]);
    flows.push_back(spec);
  }
  return flows;
}

BiscayController::Params ParseBiscay(const YAML::Node& n) {
  CheckKeys(n, "biscay", {"startup_samples", "stale_intervals", "hysteresis", "streak"});
  BiscayController::Params p;
  Read(n, "biscay", "startup_samples", p.startup_valid_samples);
  Read(n, "biscay", "stale_intervals", p.stale_intervals);
  Read(n, "biscay", "hysteresis", p.detector.hysteresis);
  Read(n, "biscay", "streak", p.detector.streak);
  return p;
}

Scenario ParseScenarioNode(const YAML::Node& n, const fs::path& base,
                           std::optional<RandomWalkProfile>& walk) {
  CheckKeys(n, "scenario",
            {"seed", "duration_ms", "mss", "trace", "radio", "wired", "cellular_buffer_bytes", "kpi",
             "flows", "biscay"});
  if (!n["trace"]) throw ValidationError("scenario: missing trace");
  Scenario s;
  Read(n, "", "seed", s.seed);
  ReadMillis(n, "", "duration_ms", s.duration);
  Read(n, "", "mss", s.mss);
  s.trace = ParseTrace(n["trace"], base, walk);
  if (n["radio"]) s.radio = ParseRadio(n["radio"], base);
  if (n["wired"]) s.wired = ParseWired(n["wired"]);
  Read(n, "", "cellular_buffer_bytes", s.cellular_buffer_bytes);
  if (n["kpi"]) s.kpi = ParseKpi(n["kpi"]);
  if (n["flows"]) {
    s.flows = ParseFlows(n["flows"]);
  } else {
    s.flows = {FlowSpec{}};
  }
  if (n["biscay"]) s.biscay = ParseBiscay(n["biscay"]);
  return s;
}

YAML::Node ParseYaml(std::string_view text) {
  try {
    return YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw ValidationError(fmt::format("config: {}", e.what()));
  }
}

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Scenario ParseScenario(std::string_view yaml, const fs::path& base_dir) {
  std::optional<RandomWalkProfile> walk;
  return ParseScenarioNode(ParseYaml(yaml), base_dir, walk);
}

Scenario LoadScenario(const fs::path& path) {
  return ParseScenario(Slurp(path), path.parent_path());
}

StudyConfig ParseStudyConfig(std::string_view yaml, const fs::path& base_dir) {
  const YAML::Node n = ParseYaml(yaml);
  CheckKeys(n, "",
            {"scenario", "ccas", "runs", "intervals_ms", "flows", "warmup_ms", "measure_window_ms",
             "jain_window_ms", "correlate_window_ms", "threads"});
  if (!n["scenario"]) throw ValidationError("study config: missing scenario");
  StudyConfig c;
  c.scenario = ParseScenarioNode(n["scenario"], base_dir, c.random_walk);
  if (const auto ccas = n["ccas"]) {
    c.ccas.clear();
    for (const auto& x : ccas) {
      auto name = Get<std::string>(x, "ccas");
      if (!IsKnownCca(name)) throw ValidationError(fmt::format("ccas: unknown cca '{}'", name));
      c.ccas.push_back(std::move(name));
    }
  }
  Read(n, "", "runs", c.runs);
  if (c.runs < 1) throw ValidationError("runs must be >= 1");
  if (const auto iv = n["intervals_ms"]) {
    c.intervals.clear();
    for (const auto& x : iv) {
      c.intervals.push_back(Micros{std::llround(Get<double>(x, "intervals_ms") * 1000.0)});
    }
  }
  Read(n, "", "flows", c.flows);
  if (c.flows < 1) throw ValidationError("flows must be >= 1");
  ReadMillis(n, "", "warmup_ms", c.warmup);
  ReadMillis(n, "", "measure_window_ms", c.measure_window);
  ReadMillis(n, "", "jain_window_ms", c.jain_window);
  ReadMillis(n, "", "correlate_window_ms", c.correlate_window);
  Read(n, "", "threads", c.threads);
  return c;
}

StudyConfig LoadStudyConfig(const fs::path& path) {
  return ParseStudyConfig(Slurp(path), path.parent_path());
}

}  // namespace kpicc
