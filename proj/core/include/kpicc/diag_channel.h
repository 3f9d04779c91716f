#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <memory>
#include <vector>

#include "kpicc/diag_frame.h"
#include "kpicc/triple_buffer.h"

namespace kpicc {

struct SequencedFrame {
  std::uint64_t seq = 0;  // 0 means never written
  DiagFrame frame;
};

enum class ReadStatus { kOk, kNoData, kNotSubscribed };

struct ReadResult {
  ReadStatus status = ReadStatus::kNoData;
  DiagFrame frame;
  std::uint64_t seq = 0;

  bool ok() const { return status == ReadStatus::kOk; }
};

// Latest-value view of a subset of message types. Owned jointly by the
// channel (writer) and one reader thread; reads are wait-free and never block
// the channel.
class Subscription {
 public:
  explicit Subscription(std::initializer_list<MsgType> filter);
  explicit Subscription(const std::vector<MsgType>& filter);

  Subscription(const Subscription&) = delete;
  Subscription& operator=(const Subscription&) = delete;

  bool Accepts(MsgType type) const;

  // Reader side.
  ReadResult ReadLatest(MsgType type);

  // Writer side; called by DiagChannel::Publish.
  void Offer(const DiagFrame& frame);

 private:
  struct Slot {
    TripleBuffer<SequencedFrame> buffer;
    std::uint64_t next_seq = 1;  // writer-owned
  };

  static constexpr std::size_t kSlots = 4;  // indexed by raw msg_type 1..3
  static std::size_t Index(MsgType type);

  std::array<std::unique_ptr<Slot>, kSlots> slots_;
};

// Fan-out point between the frame decoder and KPI consumers. Publishing is
// done by a single writer; Subscribe and AddListener are set-up calls made
// from that same writer context.
class DiagChannel {
 public:
  using Listener = std::function<void(const DiagFrame&)>;

  std::shared_ptr<Subscription> Subscribe(std::initializer_list<MsgType> filter);
  std::shared_ptr<Subscription> Subscribe(const std::vector<MsgType>& filter);

  // Ordered, lossless delivery of every published frame to in-thread
  // consumers (e.g. the bandwidth monitor).
  void AddListener(Listener listener);

  void Publish(const DiagFrame& frame);

  std::uint64_t published() const { return published_; }

 private:
  std::vector<std::shared_ptr<Subscription>> subscriptions_;
  std::vector<Listener> listeners_;
  std::uint64_t published_ = 0;
};

}  // namespace kpicc
