#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "kpicc/bandwidth.h"
#include "kpicc/diag_frame.h"
#include "kpicc/link_trace.h"
#include "kpicc/tput_table.h"
#include "kpicc/units.h"

namespace kpicc {

struct CarrierConfig {
  std::uint8_t mimo_layers = 1;
  Micros tti = kTti4g;
};

// Per-period uniform redraw of the TBS index, emulating link adaptation.
struct TbsVariation {
  std::uint8_t min_index = 4;
  std::uint8_t max_index = 20;
  Micros period = milliseconds{20};
};

struct RadioConfig {
  std::vector<CarrierConfig> carriers{CarrierConfig{}};
  Direction direction = Direction::kUplink;
  std::uint8_t fixed_tbs_index = 10;
  std::optional<TbsVariation> tbs_variation;
  // Relative standard deviation of multiplicative noise on each grant's
  // target bits; approximates scheduler behaviour the inversion cannot model.
  double grant_noise = 0.0;
  std::uint16_t cell_id = 1;
  TputTable table = TputTable::Default();
};

// Throws ValidationError on out-of-range carrier fields.
void Validate(const RadioConfig& cfg);

// Largest capacity the radio can express with its current TBS (all carriers
// at 273 PRBs), in bit/s.
double MaxRadioCapacity(const RadioConfig& cfg, std::uint8_t tbs_index);

struct BufferPolicy {
  enum class Mode : std::uint8_t { kDrain, kBatch };

  Mode mode = Mode::kDrain;
  Micros period = milliseconds{1};

  static BufferPolicy Drain(Micros period = milliseconds{1}) { return {Mode::kDrain, period}; }
  static BufferPolicy Batch(Micros period = milliseconds{1000}) { return {Mode::kBatch, period}; }
};

const char* ToString(BufferPolicy::Mode mode);

// Incremental trace -> grant inversion. For every TTI and carrier it fixes
// the TBS index and picks the PRB count whose table bits (times MIMO layers) are nearest the
// carrier's equal share of the trace capacity.
class GrantGenerator {
 public:
  GrantGenerator(const LinkTrace& trace, const RadioConfig& cfg, std::uint64_t seed = 1);

  bool done() const;
  Micros next_time() const;
  // Grants for the next TTI start across all carriers due at that instant.
  void Next(std::vector<TimedGrant>& out);

  std::uint64_t clamped_grants() const { return clamped_; }

 private:
  std::uint8_t CurrentTbs(Micros t);

  const LinkTrace* trace_;
  const RadioConfig* cfg_;
  std::vector<Micros> next_tti_;
  std::mt19937_64 noise_rng_;
  std::mt19937_64 tbs_rng_;
  std::uint8_t tbs_ = 0;
  Micros next_tbs_change_{0};
  std::uint64_t clamped_ = 0;
};

struct GrantSchedule {
  std::vector<TimedGrant> grants;
  std::uint64_t clamped_grants = 0;  // warning diagnostic: capacity above radio max
};

GrantSchedule GrantsFromCapacity(const LinkTrace& trace, const RadioConfig& cfg,
                                 std::uint64_t seed = 1);

struct TimedReport {
  Micros window_start{0};
  GrantedBytesReport report;
};

// Tiles [start, end) with `window`-sized reports; bytes_granted is the floor
// of the window's grant bits over 8. bytes_used mirrors bytes_granted (the
// emulated UE always has data queued).
std::vector<TimedReport> GrantedBytesRollup(std::span<const TimedGrant> grants,
                                            const TputTable& table, Micros start, Micros end,
                                            Micros window = milliseconds{100});

struct EmulatorPeriods {
  Micros cell_meas = milliseconds{10};
  Micros granted_bytes = milliseconds{100};
};

// Turns a capacity trace into the diag-frame stream a modem would produce
// and holds it in an internal buffer released per BufferPolicy.
class ModemEmulator {
 public:
  using ReleaseSink = std::function<void(std::span<const DiagFrame>, Micros release_time)>;
  using GrantSink = std::function<void(const TimedGrant&)>;

  ModemEmulator(LinkTrace trace, RadioConfig cfg, BufferPolicy policy, std::uint64_t seed = 1,
                EmulatorPeriods periods = {});

  ModemEmulator(const ModemEmulator&) = delete;
  ModemEmulator& operator=(const ModemEmulator&) = delete;

  // Frames leaving the modem's internal buffer.
  void SetReleaseSink(ReleaseSink sink) { release_sink_ = std::move(sink); }
  // Radio-side view: every grant as it is scheduled, before any buffering.
  void SetGrantSink(GrantSink sink) { grant_sink_ = std::move(sink); }

  // Generates every frame due at or before `now` and performs every release
  // boundary up to `now`, in time order.
  void AdvanceTo(Micros now);

  // Earliest instant at which AdvanceTo would do anything; Micros::max() once
  // the trace is exhausted and the buffer is empty.
  Micros NextEventTime() const;

  const LinkTrace& trace() const { return trace_; }
  const RadioConfig& config() const { return cfg_; }
  const BufferPolicy& policy() const { return policy_; }
  std::uint64_t frames_generated() const { return frames_generated_; }
  std::uint64_t frames_released() const { return frames_released_; }
  std::uint64_t clamped_grants() const { return generator_.clamped_grants(); }
  std::size_t buffered() const { return buffer_.size(); }

 private:
  Micros NextGenerationTime() const;
  void GenerateAt(Micros t);
  void ReleaseAt(Micros t);
  CellMeas MeasurementAt(Micros t) const;

  LinkTrace trace_;
  RadioConfig cfg_;
  BufferPolicy policy_;
  EmulatorPeriods periods_;
  GrantGenerator generator_;

  ReleaseSink release_sink_;
  GrantSink grant_sink_;

  std::vector<DiagFrame> buffer_;
  std::vector<TimedGrant> scratch_;
  Micros next_cell_meas_{0};
  Micros next_report_;
  Micros next_release_;
  std::uint64_t window_bits_ = 0;
  std::uint64_t frames_generated_ = 0;
  std::uint64_t frames_released_ = 0;
};

}  // namespace kpicc
