#pragma once

#include <deque>
#include <functional>
#include <optional>
#include <utility>

#include "kpicc/units.h"

namespace kpicc {

// Best value (per Compare) among samples taken within a trailing time window.
// Monotonic deque; amortized O(1) per update.
template <typename T, typename Compare>
class WindowedFilter {
 public:
  explicit WindowedFilter(Micros window) : window_(window) {}

  void set_window(Micros window) { window_ = window; }
  Micros window() const { return window_; }

  T Update(Micros now, T sample) {
    while (!samples_.empty() && !Compare{}(samples_.back().second, sample)) samples_.pop_back();
    samples_.emplace_back(now, sample);
    Expire(now);
    return samples_.front().second;
  }

  void Expire(Micros now) {
    // The newest sample is always kept.
    while (samples_.size() > 1 && samples_.front().first < now - window_) samples_.pop_front();
  }

  std::optional<T> Best() const {
    if (samples_.empty()) return std::nullopt;
    return samples_.front().second;
  }

  std::optional<T> BestAt(Micros now) {
    Expire(now);
    return Best();
  }

  void Reset() { samples_.clear(); }

 private:
  Micros window_;
  std::deque<std::pair<Micros, T>> samples_;
};

template <typename T>
using WindowedMin = WindowedFilter<T, std::less<T>>;
template <typename T>
using WindowedMax = WindowedFilter<T, std::greater<T>>;

}  // namespace kpicc
