#include "kpicc/link_trace.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <string_view>

#include <fmt/format.h>

#include "kpicc/error.h"

namespace kpicc {

LinkTrace::LinkTrace(std::vector<TraceSample> samples) : samples_(std::move(samples)) {
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (samples_[i].capacity_bps < 0 || !std::isfinite(samples_[i].capacity_bps)) {
      throw ValidationError(fmt::format("trace sample {} has invalid capacity", i));
    }
    if (samples_[i].time_ms < 0) {
      throw ValidationError(fmt::format("trace sample {} has negative time", i));
    }
    if (i > 0 && samples_[i].time_ms <= samples_[i - 1].time_ms) {
      throw ValidationError(fmt::format("trace sample {} is not after sample {}", i, i - 1));
    }
  }
}

Micros LinkTrace::duration() const {
  return samples_.empty() ? Micros{0} : FromMillis(samples_.back().time_ms);
}

double LinkTrace::CapacityAt(Micros t) const {
  if (samples_.empty()) return 0.0;
  const double t_ms = ToMillis(t);
  auto it = std::upper_bound(samples_.begin(), samples_.end(), t_ms,
                             [](double v, const TraceSample& s) {
                               return v < static_cast<double>(s.time_ms);
                             });
  if (it == samples_.begin()) return samples_.front().capacity_bps;
  return std::prev(it)->capacity_bps;
}

double LinkTrace::MeanCapacity(Micros from, Micros to) const {
  if (to <= from || samples_.empty()) return CapacityAt(from);
  double bits = 0.0;
  Micros t = from;
  while (t < to) {
    // Next breakpoint strictly after t.
    Micros next = to;
    auto it = std::upper_bound(samples_.begin(), samples_.end(), t,
                               [](Micros v, const TraceSample& s) {
                                 return v < FromMillis(s.time_ms);
                               });
    if (it != samples_.end()) next = std::min(next, FromMillis(it->time_ms));
    bits += CapacityAt(t) * ToSeconds(next - t);
    t = next;
  }
  return bits / ToSeconds(to - from);
}

double LinkTrace::PeakCapacity() const {
  double peak = 0.0;
  for (const auto& s : samples_) peak = std::max(peak, s.capacity_bps);
  return peak;
}

namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

template <typename T>
bool ParseNumber(std::string_view s, T& out) {
  s = Trim(s);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

LinkTrace ReadTraceCsv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<TraceSample> samples;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = Trim(line);
    if (view.empty()) continue;
    if (!header_seen) {
      if (view != "time_ms,capacity_bps") {
        throw ValidationError(
            fmt::format("line {}: expected header 'time_ms,capacity_bps'", line_no));
      }
      header_seen = true;
      continue;
    }
    const auto comma = view.find(',');
    TraceSample s;
    if (comma == std::string_view::npos || !ParseNumber(view.substr(0, comma), s.time_ms) ||
        !ParseNumber(view.substr(comma + 1), s.capacity_bps)) {
      throw ValidationError(fmt::format("line {}: malformed sample '{}'", line_no, view));
    }
    if (s.capacity_bps < 0) {
      throw ValidationError(fmt::format("line {}: negative capacity", line_no));
    }
    if (!samples.empty() && s.time_ms <= samples.back().time_ms) {
      throw ValidationError(
          fmt::format("line {}: timestamp {} does not increase", line_no, s.time_ms));
    }
    samples.push_back(s);
  }
  if (!header_seen) throw ValidationError("trace file is empty");
  return LinkTrace(std::move(samples));
}

LinkTrace LoadTraceCsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open trace file " + path.string());
  return ReadTraceCsv(in);
}

void WriteTraceCsv(const LinkTrace& trace, std::ostream& out) {
  out << "time_ms,capacity_bps\n";
  for (const auto& s : trace.samples()) out << fmt::format("{},{}\n", s.time_ms, s.capacity_bps);
}

void SaveTraceCsv(const LinkTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write trace file " + path.string());
  WriteTraceCsv(trace, out);
}

LinkTrace GenerateRandomWalk(const RandomWalkProfile& p) {
  if (p.min_mbps < 0 || p.max_mbps < p.min_mbps || p.interval_ms <= 0 || p.duration_ms <= 0) {
    throw ValidationError("random-walk profile needs 0 <= min <= max and positive durations");
  }
  std::mt19937_64 rng(p.seed);
  std::uniform_real_distribution<double> step(-p.step_mbps, p.step_mbps);
  double mbps = 0.5 * (p.min_mbps + p.max_mbps);
  std::vector<TraceSample> samples;
  for (std::int64_t t = 0; t < p.duration_ms; t += p.interval_ms) {
    samples.push_back({t, std::round(mbps * 1e6)});
    mbps += step(rng);
    // Reflect at the bounds.
    if (mbps > p.max_mbps) mbps = 2 * p.max_mbps - mbps;
    if (mbps < p.min_mbps) mbps = 2 * p.min_mbps - mbps;
    mbps = std::clamp(mbps, p.min_mbps, p.max_mbps);
  }
  samples.push_back({p.duration_ms, samples.back().capacity_bps});
  return LinkTrace(std::move(samples));
}

LinkTrace ConstantTrace(double capacity_bps, std::int64_t duration_ms) {
  if (duration_ms <= 0) return LinkTrace({{0, capacity_bps}});
  return LinkTrace({{0, capacity_bps}, {duration_ms, capacity_bps}});
}

}  // namespace kpicc
