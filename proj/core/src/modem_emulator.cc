#include "kpicc/modem_emulator.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "kpicc/error.h"

namespace kpicc {

void Validate(const RadioConfig& cfg) {
  if (cfg.carriers.empty()) throw ValidationError("radio needs at least one carrier");
  if (cfg.carriers.size() > 255) throw ValidationError("too many carriers");
  for (std::size_t i = 0; i < cfg.carriers.size(); ++i) {
    const auto& c = cfg.carriers[i];
    if (c.mimo_layers != 1 && c.mimo_layers != 2 && c.mimo_layers != 4) {
      throw ValidationError(fmt::format("carrier {}: mimo_layers must be 1, 2 or 4", i));
    }
    if (c.tti != kTti4g && c.tti != kTti5g) {
      throw ValidationError(fmt::format("carrier {}: tti must be 500 or 1000 us", i));
    }
  }
  if (cfg.fixed_tbs_index > kMaxTbsIndex) throw ValidationError("tbs_index must be <= 26");
  if (cfg.tbs_variation) {
    const auto& v = *cfg.tbs_variation;
    if (v.min_index > v.max_index || v.max_index > kMaxTbsIndex || v.period <= Micros{0}) {
      throw ValidationError("tbs_variation needs min <= max <= 26 and a positive period");
    }
  }
  if (cfg.grant_noise < 0) throw ValidationError("grant_noise must be >= 0");
  if (cfg.table.direction() != cfg.direction) {
    throw ValidationError("throughput table direction does not match the radio direction");
  }
}

double MaxRadioCapacity(const RadioConfig& cfg, std::uint8_t tbs_index) {
  double bps = 0.0;
  for (const auto& c : cfg.carriers) {
    bps += static_cast<double>(cfg.table.Bits(kMaxPrb, tbs_index)) * c.mimo_layers /
           ToSeconds(c.tti);
  }
  return bps;
}

const char* ToString(BufferPolicy::Mode mode) {
  return mode == BufferPolicy::Mode::kDrain ? "drain" : "batch";
}

GrantGenerator::GrantGenerator(const LinkTrace& trace, const RadioConfig& cfg,
                               std::uint64_t seed)
    : trace_(&trace),
      cfg_(&cfg),
      next_tti_(cfg.carriers.size(), Micros{0}),
      noise_rng_(seed),
      tbs_rng_(seed ^ 0x9E3779B97F4A7C15ULL),
      tbs_(cfg.fixed_tbs_index) {}

bool GrantGenerator::done() const { return next_time() >= trace_->duration(); }

Micros GrantGenerator::next_time() const {
  return *std::min_element(next_tti_.begin(), next_tti_.end());
}

std::uint8_t GrantGenerator::CurrentTbs(Micros t) {
  if (!cfg_->tbs_variation) return cfg_->fixed_tbs_index;
  const auto& v = *cfg_->tbs_variation;
  while (t >= next_tbs_change_) {
    std::uniform_int_distribution<int> pick(v.min_index, v.max_index);
    tbs_ = static_cast<std::uint8_t>(pick(tbs_rng_));
    next_tbs_change_ += v.period;
  }
  return tbs_;
}

void GrantGenerator::Next(std::vector<TimedGrant>& out) {
  const Micros t = next_time();
  const std::uint8_t tbs = CurrentTbs(t);
  const double share = trace_->CapacityAt(t) / static_cast<double>(cfg_->carriers.size());
  std::normal_distribution<double> noise(0.0, 1.0);
  for (std::size_t c = 0; c < cfg_->carriers.size(); ++c) {
    if (next_tti_[c] != t) continue;
    const CarrierConfig& carrier = cfg_->carriers[c];
    double target_bits = share * ToSeconds(carrier.tti);
    if (cfg_->grant_noise > 0) {
      target_bits *= std::max(0.0, 1.0 + cfg_->grant_noise * noise(noise_rng_));
    }
    const double max_bits =
        static_cast<double>(cfg_->table.Bits(kMaxPrb, tbs)) * carrier.mimo_layers;
    if (target_bits > max_bits) ++clamped_;

    DciGrant g;
    g.carrier_id = static_cast<std::uint8_t>(c);
    g.direction = cfg_->direction;
    g.prb = cfg_->table.NearestPrb(target_bits, tbs, carrier.mimo_layers);
    g.tbs_index = tbs;
    g.mimo_layers = carrier.mimo_layers;
    g.tti = carrier.tti;
    out.push_back({t, g});
    next_tti_[c] += carrier.tti;
  }
}

GrantSchedule GrantsFromCapacity(const LinkTrace& trace, const RadioConfig& cfg,
                                 std::uint64_t seed) {
  Validate(cfg);
  GrantSchedule schedule;
  GrantGenerator gen(trace, cfg, seed);
  while (!gen.done()) gen.Next(schedule.grants);
  schedule.clamped_grants = gen.clamped_grants();
  return schedule;
}

std::vector<TimedReport> GrantedBytesRollup(std::span<const TimedGrant> grants,
                                            const TputTable& table, Micros start, Micros end,
                                            Micros window) {
  if (window <= Micros{0}) throw std::invalid_argument("rollup window must be positive");
  std::vector<TimedReport> reports;
  if (end <= start) return reports;
  const auto count = static_cast<std::size_t>((end - start + window - Micros{1}) / window);
  std::vector<std::uint64_t> bits(count, 0);
  for (const auto& g : grants) {
    if (g.time < start || g.time >= end) continue;
    bits[static_cast<std::size_t>((g.time - start) / window)] += GrantBits(g.grant, table);
  }
  reports.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto bytes = static_cast<std::uint32_t>(bits[i] / 8);
    reports.push_back({start + window * static_cast<std::int64_t>(i), {window, bytes, bytes}});
  }
  return reports;
}

ModemEmulator::ModemEmulator(LinkTrace trace, RadioConfig cfg, BufferPolicy policy,
                             std::uint64_t seed, EmulatorPeriods periods)
    : trace_(std::move(trace)),
      cfg_(std::move(cfg)),
      policy_(policy),
      periods_(periods),
      generator_(trace_, cfg_, seed),
      next_report_(periods.granted_bytes),
      next_release_(policy.period) {
  Validate(cfg_);
  if (policy_.period <= Micros{0}) throw ValidationError("buffer policy period must be positive");
  if (periods_.cell_meas <= Micros{0} || periods_.granted_bytes <= Micros{0}) {
    throw ValidationError("emitter periods must be positive");
  }
}

Micros ModemEmulator::NextGenerationTime() const {
  constexpr Micros kNever = Micros::max();
  const Micros end = trace_.duration();
  Micros t = kNever;
  if (!generator_.done()) t = std::min(t, generator_.next_time());
  if (next_cell_meas_ < end) t = std::min(t, next_cell_meas_);
  if (next_report_ <= end) t = std::min(t, next_report_);
  return t;
}

Micros ModemEmulator::NextEventTime() const {
  const Micros gen = NextGenerationTime();
  if (gen == Micros::max() && buffer_.empty()) return Micros::max();
  // Release boundaries with nothing buffered are no-ops; skip straight to the
  // boundary after the next generation.
  if (buffer_.empty()) return gen;
  return std::min(gen, next_release_);
}

void ModemEmulator::AdvanceTo(Micros now) {
  while (true) {
    const Micros gen = NextGenerationTime();
    const Micros rel = buffer_.empty() ? Micros::max() : next_release_;
    const Micros t = std::min(gen, rel);
    if (t == Micros::max() || t > now) break;
    // A boundary releases what was buffered before it; frames generated at
    // the boundary wait for the next one.
    if (rel <= gen) {
      ReleaseAt(rel);
    } else {
      GenerateAt(gen);
    }
  }
  // Keep the release grid aligned with the clock while idle.
  if (buffer_.empty()) {
    while (next_release_ < now) next_release_ += policy_.period;
  }
}

void ModemEmulator::GenerateAt(Micros t) {
  const auto ts = static_cast<std::uint64_t>(t.count());
  // The granted-bytes report closes the window ending at t, so it goes out
  // before the grants that start at t.
  if (next_report_ == t && t <= trace_.duration()) {
    const auto bytes = static_cast<std::uint32_t>(window_bits_ / 8);
    buffer_.push_back(MakeFrame(GrantedBytesReport{periods_.granted_bytes, bytes, bytes}, ts));
    ++frames_generated_;
    window_bits_ = 0;
    next_report_ += periods_.granted_bytes;
  }
  if (!generator_.done() && generator_.next_time() == t) {
    scratch_.clear();
    generator_.Next(scratch_);
    for (const auto& g : scratch_) {
      window_bits_ += GrantBits(g.grant, cfg_.table);
      if (grant_sink_) grant_sink_(g);
      buffer_.push_back(MakeFrame(g.grant, ts));
      ++frames_generated_;
    }
  }
  if (next_cell_meas_ == t && t < trace_.duration()) {
    buffer_.push_back(MakeFrame(MeasurementAt(t), ts));
    ++frames_generated_;
    next_cell_meas_ += periods_.cell_meas;
  }
  if (buffer_.empty()) return;
  // A release boundary that already passed while idle applies from now on.
  while (next_release_ <= t) next_release_ += policy_.period;
}

void ModemEmulator::ReleaseAt(Micros t) {
  if (!buffer_.empty()) {
    frames_released_ += buffer_.size();
    if (release_sink_) release_sink_(buffer_, t);
    buffer_.clear();
  }
  next_release_ = t + policy_.period;
}

CellMeas ModemEmulator::MeasurementAt(Micros t) const {
  // Map capacity onto a plausible RSRP range: -140 dBm .. -70 dBm.
  const double mbps = trace_.CapacityAt(t) / 1e6;
  const double dbm = std::clamp(-140.0 + mbps, -140.0, -70.0);
  return {static_cast<std::int32_t>(std::lround(dbm * 100.0)), cfg_.cell_id};
}

}  // namespace kpicc
