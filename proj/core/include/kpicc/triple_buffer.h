#pragma once

#include <array>
#include <atomic>
#include <cstdint>

namespace kpicc {

// Single-producer / single-consumer latest-value buffer. The writer fills its
// private slot and swaps it into the shared middle position; the reader swaps
// the middle with its own slot when a fresh value is flagged. Neither side
// ever waits on the other, and each side only touches a slot it owns.
template <typename T>
class TripleBuffer {
 public:
  TripleBuffer() = default;
  explicit TripleBuffer(const T& initial) : slots_{Slot{initial}, Slot{initial}, Slot{initial}} {}

  TripleBuffer(const TripleBuffer&) = delete;
  TripleBuffer& operator=(const TripleBuffer&) = delete;

  // Writer side.
  T& write_slot() { return slots_[write_].value; }
  void Publish() {
    const std::uint8_t prev = middle_.exchange(write_ | kDirty, std::memory_order_acq_rel);
    write_ = prev & kIndexMask;
  }

  // Reader side. Returns true if a newer value was swapped in.
  bool Update() {
    if ((middle_.load(std::memory_order_relaxed) & kDirty) == 0) return false;
    const std::uint8_t prev = middle_.exchange(read_, std::memory_order_acq_rel);
    read_ = prev & kIndexMask;
    return true;
  }
  const T& read_slot() const { return slots_[read_].value; }

 private:
  static constexpr std::uint8_t kDirty = 0x4;
  static constexpr std::uint8_t kIndexMask = 0x3;

  struct alignas(64) Slot {
    T value{};
  };

  std::array<Slot, 3> slots_{};
  std::atomic<std::uint8_t> middle_{1};
  std::uint8_t write_ = 0;  // writer-owned
  std::uint8_t read_ = 2;   // reader-owned
};

}  // namespace kpicc
