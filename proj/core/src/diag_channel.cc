#include "kpicc/diag_channel.h"

#include <stdexcept>

namespace kpicc {

Subscription::Subscription(std::initializer_list<MsgType> filter)
    : Subscription(std::vector<MsgType>(filter)) {}

Subscription::Subscription(const std::vector<MsgType>& filter) {
  for (MsgType type : filter) {
    const std::size_t i = Index(type);
    if (i >= kSlots) throw std::invalid_argument("cannot subscribe to an unknown msg_type");
    if (!slots_[i]) slots_[i] = std::make_unique<Slot>();
  }
}

std::size_t Subscription::Index(MsgType type) {
  return IsKnownMsgType(static_cast<std::uint16_t>(type)) ? static_cast<std::size_t>(type)
                                                           : kSlots;
}

bool Subscription::Accepts(MsgType type) const {
  const std::size_t i = Index(type);
  return i < kSlots && slots_[i] != nullptr;
}

ReadResult Subscription::ReadLatest(MsgType type) {
  if (!Accepts(type)) return {ReadStatus::kNotSubscribed, {}, 0};
  auto& buffer = slots_[Index(type)]->buffer;
  buffer.Update();
  const SequencedFrame& latest = buffer.read_slot();
  if (latest.seq == 0) return {ReadStatus::kNoData, {}, 0};
  return {ReadStatus::kOk, latest.frame, latest.seq};
}

void Subscription::Offer(const DiagFrame& frame) {
  if (!Accepts(frame.msg_type)) return;
  Slot& slot = *slots_[Index(frame.msg_type)];
  SequencedFrame& dst = slot.buffer.write_slot();
  dst.seq = slot.next_seq++;
  dst.frame = frame;
  slot.buffer.Publish();
}

std::shared_ptr<Subscription> DiagChannel::Subscribe(std::initializer_list<MsgType> filter) {
  return Subscribe(std::vector<MsgType>(filter));
}

std::shared_ptr<Subscription> DiagChannel::Subscribe(const std::vector<MsgType>& filter) {
  auto sub = std::make_shared<Subscription>(filter);
  subscriptions_.push_back(sub);
  return sub;
}

void DiagChannel::AddListener(Listener listener) { listeners_.push_back(std::move(listener)); }

void DiagChannel::Publish(const DiagFrame& frame) {
  ++published_;
  for (const auto& sub : subscriptions_) sub->Offer(frame);
  for (const auto& listener : listeners_) listener(frame);
}

}  // namespace kpicc
