#include "kpicc/study.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <functional>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>

#include "kpicc/bandwidth.h"
#include "kpicc/cca_biscay.h"
#include "kpicc/error.h"
#include "kpicc/measure.h"
#include "kpicc/metrics.h"
#include "kpicc/modem_emulator.h"
#include "kpicc/netsim.h"

namespace kpicc {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

// Runs fn(0..n-1) on up to `threads` workers; results keep index order.
template <typename R>
std::vector<R> ParallelMap(std::size_t n, unsigned threads, const std::function<R(std::size_t)>& fn) {
  std::vector<std::optional<R>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<R> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

struct Job {
  Scenario scenario;
  int run = 0;
  std::uint64_t seed = 0;
  std::string label;
  std::optional<double> param;
};

struct Outcome {
  MetricsReport report;
  std::vector<double> throughput_bps;  // all flows, measure_window tiles
  std::vector<std::pair<Micros, int>> states;
  Micros min_rtt{0};
};

struct Seeds {
  std::uint64_t scenario;
  std::optional<std::uint64_t> walk;
};

Seeds BaseSeeds(const StudyConfig& c, std::optional<std::uint64_t> seed) {
  Seeds s{seed.value_or(c.scenario.seed), std::nullopt};
  if (c.random_walk) s.walk = seed.value_or(c.random_walk->seed);
  return s;
}

Scenario ScenarioForRun(const StudyConfig& c, const Seeds& seeds, int run) {
  Scenario s = c.scenario;
  s.seed = seeds.scenario + static_cast<std::uint64_t>(run);
  if (c.random_walk) {
    RandomWalkProfile p = *c.random_walk;
    p.seed = *seeds.walk + static_cast<std::uint64_t>(run);
    s.trace = GenerateRandomWalk(p);
  }
  return s;
}

std::vector<FlowSpec> FlowsOf(const Scenario& base, const std::string& cca, int count) {
  const FlowSpec& proto = base.flows.front();
  std::vector<FlowSpec> flows;
  for (int i = 0; i < count; ++i) {
    FlowSpec f = proto;
    f.cca = cca;
    flows.push_back(f);
  }
  return flows;
}

Outcome Execute(const Job& job, const StudyConfig& c) {
  const SimResult result = Run(job.scenario);
  std::vector<std::string> names;
  for (const auto& f : job.scenario.flows) names.push_back(f.cca);

  Outcome out;
  out.report = ComputeReport(result.log, names, c.jain_window, c.warmup);
  const Measurement m = Measure(result.log, c.measure_window);
  for (const auto& [id, series] : m.flows) {
    if (out.throughput_bps.size() < series.throughput_bps.size()) {
      out.throughput_bps.resize(series.throughput_bps.size(), 0.0);
    }
    for (std::size_t i = 0; i < series.throughput_bps.size(); ++i) {
      out.throughput_bps[i] += series.throughput_bps[i];
    }
    for (Micros r : series.rtt) {
      if (out.min_rtt == Micros{0} || r < out.min_rtt) out.min_rtt = r;
    }
  }
  for (const auto& r : result.log.records()) {
    if (r.kind == LogKind::kState) out.states.emplace_back(r.time, static_cast<int>(r.value));
  }
  return out;
}

std::vector<Outcome> ExecuteAll(const std::vector<Job>& jobs, const StudyConfig& c) {
  for (const auto& j : jobs) Validate(j.scenario);
  return ParallelMap<Outcome>(jobs.size(), c.threads,
                              [&](std::size_t i) { return Execute(jobs[i], c); });
}

std::string Num(double v, int precision = 3) { return fmt::format("{:.{}f}", v, precision); }

Json Optional(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json FlowJson(const FlowMetrics& f) {
  Json j;
  j["flow"] = f.flow;
  j["cca"] = f.cca;
  j["throughput_bps"] = f.throughput_bps;
  j["delay_samples"] = f.delay.samples;
  j["delay_mean_ms"] = f.delay.mean_ms;
  Json p = Json::object();
  for (std::size_t i = 0; i < kReportedPercentiles.size(); ++i) {
    p[std::to_string(kReportedPercentiles[i])] = f.delay.percentile_ms[i];
  }
  j["delay_percentiles_ms"] = std::move(p);
  j["power"] = f.power;
  j["sent_bytes"] = f.sent_bytes;
  j["delivered_bytes"] = f.delivered_bytes;
  j["dropped_bytes"] = f.dropped_bytes;
  j["lost_packets"] = f.lost_packets;
  j["timeouts"] = f.timeouts;
  return j;
}

std::optional<double> Median(std::vector<double> v) { return Percentile(std::move(v), 50.0); }

std::vector<double> Defined(const std::vector<std::optional<double>>& v) {
  std::vector<double> out;
  for (const auto& x : v) {
    if (x) out.push_back(*x);
  }
  return out;
}

constexpr std::string_view kNetsimHeader =
    "study,run,seed,param,cca,flow,throughput_mbps,delay_mean_ms,delay_p10_ms,delay_p25_ms,"
    "delay_p50_ms,delay_p75_ms,delay_p90_ms,delay_p95_ms,delay_p99_ms,power,sent_bytes,"
    "delivered_bytes,dropped_bytes,lost_packets,timeouts,jain,jain_window_median\n";

void AppendRows(std::string& csv, std::string_view study, const Job& job, const Outcome& o) {
  const auto jain = o.report.jain;
  const auto jain_median = Median(Defined(o.report.jain_windows));
  for (const auto& f : o.report.flows) {
    csv += fmt::format("{},{},{},{},{},{},{}", study, job.run, job.seed,
                       job.param ? Num(*job.param) : "", f.cca, f.flow, Num(f.throughput_bps / 1e6, 4));
    csv += fmt::format(",{}", Num(f.delay.mean_ms));
    for (double p : f.delay.percentile_ms) csv += fmt::format(",{}", Num(p));
    csv += fmt::format(",{},{},{},{},{},{},{},{}\n", Num(f.power, 1), f.sent_bytes, f.delivered_bytes,
                       f.dropped_bytes, f.lost_packets, f.timeouts, jain ? Num(*jain, 4) : "",
                       jain_median ? Num(*jain_median, 4) : "");
  }
}

Json RunJson(const Job& job, const Outcome& o) {
  Json j;
  j["run"] = job.run;
  j["seed"] = job.seed;
  j["label"] = job.label;
  if (job.param) j["param"] = *job.param;
  j["flows"] = Json::array();
  for (const auto& f : o.report.flows) j["flows"].push_back(FlowJson(f));
  j["aggregate"] = FlowJson(o.report.aggregate);
  j["min_rtt_ms"] = ToMillis(o.min_rtt);
  return j;
}

Json Header(std::string_view name, const StudyConfig& c, const Seeds& seeds) {
  Json j;
  j["study"] = name;
  j["seed"] = seeds.scenario;
  if (seeds.walk) j["trace_seed"] = *seeds.walk;
  j["runs_per_config"] = c.runs;
  j["duration_ms"] = ToMillis(c.scenario.EffectiveDuration());
  return j;
}

// -- compare ----------------------------------------------------------------

StudyOutput Compare(const StudyConfig& c, const Seeds& seeds) {
  std::vector<Job> jobs;
  for (int run = 0; run < c.runs; ++run) {
    for (const auto& cca : c.ccas) {
      Job job{ScenarioForRun(c, seeds, run), run, 0, cca, std::nullopt};
      job.seed = job.scenario.seed;
      job.scenario.flows = FlowsOf(job.scenario, cca, 1);
      jobs.push_back(std::move(job));
    }
  }
  const auto outcomes = ExecuteAll(jobs, c);

  StudyOutput out{"compare", std::string(kNetsimHeader), {}};
  Json report = Header("compare", c, seeds);
  report["ccas"] = c.ccas;
  report["runs"] = Json::array();
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    AppendRows(out.summary_csv, "compare", jobs[i], outcomes[i]);
    report["runs"].push_back(RunJson(jobs[i], outcomes[i]));
  }
  // Ratios of the first CCA against every other one, per run.
  Json ratios = Json::array();
  const std::size_t k = c.ccas.size();
  for (int run = 0; run < c.runs; ++run) {
    const auto& ref = outcomes[run * k].report.aggregate;
    for (std::size_t b = 1; b < k; ++b) {
      const auto& base = outcomes[run * k + b].report.aggregate;
      Json r;
      r["run"] = run;
      r["cca"] = c.ccas.front();
      r["baseline"] = c.ccas[b];
      r["delay_mean_ratio"] = base.delay.mean_ms > 0 ? Json(ref.delay.mean_ms / base.delay.mean_ms) : Json(nullptr);
      r["delay_p95_ratio"] = base.delay.at(95) > 0 ? Json(ref.delay.at(95) / base.delay.at(95)) : Json(nullptr);
      r["throughput_ratio"] = base.throughput_bps > 0 ? Json(ref.throughput_bps / base.throughput_bps) : Json(nullptr);
      ratios.push_back(std::move(r));
    }
  }
  report["ratios"] = std::move(ratios);
  out.report_json = report.dump(2) + "\n";
  return out;
}

// -- sweep ------------------------------------------------------------------

StudyOutput Sweep(const StudyConfig& c, const Seeds& seeds) {
  std::vector<Job> jobs;
  const std::string cca = c.ccas.empty() ? "biscay" : c.ccas.front();
  for (Micros interval : c.intervals) {
    for (int run = 0; run < c.runs; ++run) {
      Job job{ScenarioForRun(c, seeds, run), run, 0, cca, ToMillis(interval)};
      job.seed = job.scenario.seed;
      job.scenario.kpi.interval = interval;
      job.scenario.flows = FlowsOf(job.scenario, cca, static_cast<int>(c.scenario.flows.size()));
      jobs.push_back(std::move(job));
    }
  }
  const auto outcomes = ExecuteAll(jobs, c);

  StudyOutput out{"sweep", std::string(kNetsimHeader), {}};
  Json report = Header("sweep", c, seeds);
  report["cca"] = cca;
  report["runs"] = Json::array();
  Json by_interval = Json::array();
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    AppendRows(out.summary_csv, "sweep", jobs[i], outcomes[i]);
    report["runs"].push_back(RunJson(jobs[i], outcomes[i]));
  }
  for (std::size_t iv = 0; iv < c.intervals.size(); ++iv) {
    double thr = 0, mean = 0, p95 = 0;
    for (int run = 0; run < c.runs; ++run) {
      const auto& a = outcomes[iv * c.runs + run].report.aggregate;
      thr += a.throughput_bps / c.runs;
      mean += a.delay.mean_ms / c.runs;
      p95 += a.delay.at(95) / c.runs;
    }
    Json j;
    j["interval_ms"] = ToMillis(c.intervals[iv]);
    j["throughput_bps"] = thr;
    j["delay_mean_ms"] = mean;
    j["delay_p95_ms"] = p95;
    by_interval.push_back(std::move(j));
  }
  report["intervals"] = std::move(by_interval);
  out.report_json = report.dump(2) + "\n";
  return out;
}

// -- multiflow --------------------------------------------------------------

StudyOutput Multiflow(const StudyConfig& c, const Seeds& seeds) {
  std::vector<Job> jobs;
  for (const auto& cca : c.ccas) {
    for (int run = 0; run < c.runs; ++run) {
      Job job{ScenarioForRun(c, seeds, run), run, 0, cca, std::nullopt};
      job.seed = job.scenario.seed;
      job.scenario.flows = FlowsOf(job.scenario, cca, c.flows);
      jobs.push_back(std::move(job));
    }
  }
  const auto outcomes = ExecuteAll(jobs, c);

  StudyOutput out{"multiflow", std::string(kNetsimHeader), {}};
  Json report = Header("multiflow", c, seeds);
  report["flows"] = c.flows;
  report["jain_window_ms"] = ToMillis(c.jain_window);
  report["runs"] = Json::array();
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    AppendRows(out.summary_csv, "multiflow", jobs[i], outcomes[i]);
    Json j = RunJson(jobs[i], outcomes[i]);
    const auto& r = outcomes[i].report;
    j["jain"] = Optional(r.jain);
    Json windows = Json::array();
    for (const auto& w : r.jain_windows) windows.push_back(Optional(w));
    j["jain_windows"] = std::move(windows);
    const auto defined = Defined(r.jain_windows);
    j["jain_window_median"] = Optional(Median(defined));
    const auto good = std::count_if(defined.begin(), defined.end(), [](double x) { return x >= 0.95; });
    j["jain_windows_at_least_0_95"] =
        r.jain_windows.empty() ? Json(nullptr)
                               : Json(static_cast<double>(good) / static_cast<double>(r.jain_windows.size()));
    report["runs"].push_back(std::move(j));
  }
  out.report_json = report.dump(2) + "\n";
  return out;
}

// -- fallback ---------------------------------------------------------------

Json Segments(const Scenario& s, const Outcome& o, Micros window) {
  const auto& sched = s.wired.capacity_schedule;
  const Micros end = s.EffectiveDuration();
  Json segments = Json::array();
  for (std::size_t i = 0; i < sched.size(); ++i) {
    const Micros start = sched[i].first;
    const Micros stop = i + 1 < sched.size() ? sched[i + 1].first : end;
    if (start >= end) break;
    const double wired = sched[i].second;
    const double cellular = s.trace.MeanCapacity(start, stop);
    // Steady state: the second half of the segment.
    const Micros mid = start + (stop - start) / 2;
    double bits = 0.0;
    Micros covered{0};
    for (std::size_t w = 0; w < o.throughput_bps.size(); ++w) {
      const Micros lo = window * static_cast<std::int64_t>(w);
      if (lo < mid || lo + window > stop) continue;
      bits += o.throughput_bps[w] * ToSeconds(window);
      covered += window;
    }
    Json j;
    j["start_ms"] = ToMillis(start);
    j["end_ms"] = ToMillis(stop);
    j["wired_bps"] = wired;
    j["cellular_bps"] = cellular;
    j["bottleneck"] = wired < cellular ? "wired" : "cellular";
    j["delivered_bps"] = covered > Micros{0} ? Json(bits / ToSeconds(covered)) : Json(nullptr);
    j["expected_bps"] = std::min(wired, cellular);

    // Time from the step to the matching state change.
    const int target = static_cast<int>(wired < cellular ? BiscayController::State::kFallback
                                                         : BiscayController::State::kBiscay);
    int before = -1;
    for (const auto& [t, state] : o.states) {
      if (t <= start) before = state;
    }
    std::optional<double> latency;
    if (i > 0 && before != target) {
      for (const auto& [t, state] : o.states) {
        if (t > start && t < stop && state == target) {
          latency = ToMillis(t - start);
          break;
        }
      }
    } else if (before == target) {
      latency = 0.0;
    }
    j["transition_latency_ms"] = Optional(latency);
    segments.push_back(std::move(j));
  }
  return segments;
}

StudyOutput Fallback(const StudyConfig& c, const Seeds& seeds) {
  std::vector<Job> jobs;
  for (int run = 0; run < c.runs; ++run) {
    Job job{ScenarioForRun(c, seeds, run), run, 0, "biscay", std::nullopt};
    job.seed = job.scenario.seed;
    job.scenario.flows = FlowsOf(job.scenario, "biscay", 1);
    jobs.push_back(std::move(job));
  }
  const auto outcomes = ExecuteAll(jobs, c);

  StudyOutput out{"fallback", std::string(kNetsimHeader), {}};
  Json report = Header("fallback", c, seeds);
  report["runs"] = Json::array();
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    AppendRows(out.summary_csv, "fallback", jobs[i], outcomes[i]);
    Json j = RunJson(jobs[i], outcomes[i]);
    Json fallback = Json::array();
    Json biscay = Json::array();
    for (const auto& [t, state] : outcomes[i].states) {
      if (state == static_cast<int>(BiscayController::State::kFallback)) fallback.push_back(ToMillis(t));
      if (state == static_cast<int>(BiscayController::State::kBiscay)) biscay.push_back(ToMillis(t));
    }
    j["fallback_entries_ms"] = std::move(fallback);
    j["biscay_entries_ms"] = std::move(biscay);
    j["segments"] = Segments(jobs[i].scenario, outcomes[i], c.measure_window);
    report["runs"].push_back(std::move(j));
  }
  out.report_json = report.dump(2) + "\n";
  return out;
}

// -- correlate --------------------------------------------------------------

struct Correlation {
  std::size_t windows = 0;
  std::optional<double> gpp3;
  std::optional<double> granted_bytes;
  std::optional<double> prb;
  std::uint64_t clamped = 0;
};

Correlation Correlate(const Scenario& s, Micros window) {
  const GrantSchedule schedule = GrantsFromCapacity(s.trace, s.radio, s.seed);
  const auto& grants = schedule.grants;
  const auto n = static_cast<std::size_t>(s.trace.duration() / window);
  const auto reports = GrantedBytesRollup(grants, s.radio.table, Micros{0},
                                          window * static_cast<std::int64_t>(n), window);
  std::vector<double> truth, gpp3, granted, prb;
  std::size_t g = 0;
  for (std::size_t w = 0; w < n; ++w) {
    const Micros lo = window * static_cast<std::int64_t>(w);
    const Micros hi = lo + window;
    const std::size_t first = g;
    double prbs = 0.0;
    while (g < grants.size() && grants[g].time < hi) prbs += grants[g++].grant.prb;
    truth.push_back(s.trace.MeanCapacity(lo, hi));
    gpp3.push_back(
        Bw3gpp(std::span(grants).subspan(first, g - first), lo, window, s.radio.table).bps);
    granted.push_back(8.0 * reports[w].report.bytes_granted / ToSeconds(window));
    prb.push_back(prbs);
  }
  return {n, Pearson(gpp3, truth), Pearson(granted, truth), Pearson(prb, truth),
          schedule.clamped_grants};
}

StudyOutput CorrelateStudy(const StudyConfig& c, const Seeds& seeds) {
  std::vector<Scenario> scenarios;
  for (int run = 0; run < c.runs; ++run) {
    scenarios.push_back(ScenarioForRun(c, seeds, run));
    if (scenarios.back().trace.duration() < c.correlate_window) {
      throw ValidationError("correlate: trace is shorter than one window");
    }
    Validate(scenarios.back().radio);
  }
  const auto results = ParallelMap<Correlation>(
      scenarios.size(), c.threads, [&](std::size_t i) { return Correlate(scenarios[i], c.correlate_window); });

  StudyOutput out{"correlate",
                  "study,run,seed,windows,pearson_gpp3,pearson_granted_bytes,pearson_prb,clamped_grants\n",
                  {}};
  Json report = Header("correlate", c, seeds);
  report["window_ms"] = ToMillis(c.correlate_window);
  report["grant_noise"] = c.scenario.radio.grant_noise;
  report["tbs_varies"] = c.scenario.radio.tbs_variation.has_value();
  report["runs"] = Json::array();
  auto cell = [](const std::optional<double>& v) { return v ? Num(*v, 6) : std::string(); };
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    out.summary_csv += fmt::format("correlate,{},{},{},{},{},{},{}\n", i, scenarios[i].seed, r.windows,
                                   cell(r.gpp3), cell(r.granted_bytes), cell(r.prb), r.clamped);
    Json j;
    j["run"] = i;
    j["seed"] = scenarios[i].seed;
    j["windows"] = r.windows;
    j["pearson_gpp3"] = Optional(r.gpp3);
    j["pearson_granted_bytes"] = Optional(r.granted_bytes);
    j["pearson_prb"] = Optional(r.prb);
    j["clamped_grants"] = r.clamped;
    report["runs"].push_back(std::move(j));
  }
  out.report_json = report.dump(2) + "\n";
  return out;
}

// -- granularity ------------------------------------------------------------

struct Granularity {
  std::size_t frames = 0;
  std::optional<double> median_interarrival_ms;
  std::size_t bursts = 0;
  std::optional<double> median_burst_period_ms;
  std::optional<double> max_within_burst_gap_ms;
};

// Arrivals closer than this belong to one burst.
constexpr Micros kBurstGap = milliseconds{5};

Granularity MeasureGranularity(const Scenario& s, BufferPolicy policy) {
  ModemEmulator modem(s.trace, s.radio, policy, s.seed);
  std::vector<Micros> arrivals;
  modem.SetReleaseSink([&](std::span<const DiagFrame> frames, Micros t) {
    for (const auto& f : frames) {
      if (f.msg_type == MsgType::kCellMeas) arrivals.push_back(t);
    }
  });
  while (modem.NextEventTime() != Micros::max()) modem.AdvanceTo(modem.NextEventTime());

  Granularity g;
  g.frames = arrivals.size();
  std::vector<double> gaps, periods, within;
  std::optional<Micros> burst_start;
  for (std::size_t i = 0; i < arrivals.size(); ++i) {
    const bool new_burst = i == 0 || arrivals[i] - arrivals[i - 1] >= kBurstGap;
    if (i > 0) {
      gaps.push_back(ToMillis(arrivals[i] - arrivals[i - 1]));
      if (!new_burst) within.push_back(gaps.back());
    }
    if (new_burst) {
      if (burst_start) periods.push_back(ToMillis(arrivals[i] - *burst_start));
      burst_start = arrivals[i];
      ++g.bursts;
    }
  }
  g.median_interarrival_ms = Median(gaps);
  g.median_burst_period_ms = Median(periods);
  if (!within.empty()) g.max_within_burst_gap_ms = *std::max_element(within.begin(), within.end());
  else if (g.bursts > 0 && g.bursts < g.frames) g.max_within_burst_gap_ms = 0.0;
  return g;
}

StudyOutput GranularityStudy(const StudyConfig& c, const Seeds& seeds) {
  const Scenario s = ScenarioForRun(c, seeds, 0);
  if (s.trace.duration() <= Micros{0}) throw ValidationError("granularity: trace has zero duration");
  Validate(s.radio);
  const std::vector<std::pair<std::string, BufferPolicy>> modes = {
      {"drain", BufferPolicy::Drain()}, {"batch", BufferPolicy::Batch()}};
  const auto results = ParallelMap<Granularity>(
      modes.size(), c.threads, [&](std::size_t i) { return MeasureGranularity(s, modes[i].second); });

  StudyOutput out{"granularity",
                  "study,mode,period_ms,cellmeas_frames,median_interarrival_ms,bursts,"
                  "median_burst_period_ms,max_within_burst_gap_ms\n",
                  {}};
  Json report = Header("granularity", c, seeds);
  report["burst_gap_ms"] = ToMillis(kBurstGap);
  report["modes"] = Json::array();
  auto cell = [](const std::optional<double>& v) { return v ? Num(*v) : std::string(); };
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const auto& r = results[i];
    out.summary_csv += fmt::format("granularity,{},{},{},{},{},{},{}\n", modes[i].first,
                                   Num(ToMillis(modes[i].second.period)), r.frames,
                                   cell(r.median_interarrival_ms), r.bursts, cell(r.median_burst_period_ms),
                                   cell(r.max_within_burst_gap_ms));
    Json j;
    j["mode"] = modes[i].first;
    j["period_ms"] = ToMillis(modes[i].second.period);
    j["cellmeas_frames"] = r.frames;
    j["median_interarrival_ms"] = Optional(r.median_interarrival_ms);
    j["bursts"] = r.bursts;
    j["median_burst_period_ms"] = Optional(r.median_burst_period_ms);
    j["max_within_burst_gap_ms"] = Optional(r.max_within_burst_gap_ms);
    report["modes"].push_back(std::move(j));
  }
  out.report_json = report.dump(2) + "\n";
  return out;
}

}  // namespace

bool IsKnownStudy(std::string_view name) {
  return std::find(std::begin(kStudyNames), std::end(kStudyNames), name) != std::end(kStudyNames);
}

StudyOutput RunStudy(std::string_view name, const StudyConfig& config,
                     std::optional<std::uint64_t> seed) {
  if (!IsKnownStudy(name)) {
    throw UsageError(fmt::format("unknown study '{}' (expected compare, sweep, multiflow, fallback, "
                                 "correlate or granularity)",
                                 name));
  }
  if (config.scenario.trace.empty() || config.scenario.trace.duration() <= Micros{0}) {
    throw ValidationError("scenario trace has zero duration");
  }
  if (config.scenario.flows.empty()) throw ValidationError("scenario has no flows");
  if (config.ccas.empty()) throw ValidationError("ccas must not be empty");
  for (const auto& cca : config.ccas) {
    if (!IsKnownCca(cca)) throw ValidationError(fmt::format("unknown cca '{}'", cca));
  }
  if (name == "sweep" && config.intervals.empty()) throw ValidationError("sweep needs intervals_ms");
  const Seeds seeds = BaseSeeds(config, seed);
  if (name == "compare") return Compare(config, seeds);
  if (name == "sweep") return Sweep(config, seeds);
  if (name == "multiflow") return Multiflow(config, seeds);
  if (name == "fallback") return Fallback(config, seeds);
  if (name == "correlate") return CorrelateStudy(config, seeds);
  return GranularityStudy(config, seeds);
}

void WriteStudyOutput(const StudyOutput& output, const fs::path& dir) {
  fs::create_directories(dir);
  auto write = [&](const char* file, const std::string& text) {
    std::ofstream out(dir / file, std::ios::binary);
    if (!out) throw Error(fmt::format("cannot write '{}'", (dir / file).string()));
    out << text;
  };
  write("summary.csv", output.summary_csv);
  write("report.json", output.report_json);
}

}  // namespace kpicc
