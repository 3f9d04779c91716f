#include "kpicc/frame_decoder.h"

#include <algorithm>
#include <array>

#include "kpicc/crc16.h"

namespace kpicc {
namespace {

constexpr std::array<std::uint8_t, 2> kMagicBytes = {kFrameMagic & 0xFF, kFrameMagic >> 8};

}  // namespace

std::vector<DiagFrame> FrameDecoder::Feed(std::span<const std::uint8_t> bytes) {
  std::vector<DiagFrame> out;
  Feed(bytes, out);
  return out;
}

void FrameDecoder::Feed(std::span<const std::uint8_t> bytes, std::vector<DiagFrame>& out) {
  buf_.insert(buf_.end(), bytes.begin(), bytes.end());

  while (true) {
    const std::span<const std::uint8_t> avail(buf_.data() + pos_, buf_.size() - pos_);
    if (avail.size() < kMagicBytes.size()) break;

    if (avail[0] != kMagicBytes[0] || avail[1] != kMagicBytes[1]) {
      auto it = std::search(avail.begin() + 1, avail.end(), kMagicBytes.begin(),
                            kMagicBytes.end());
      std::size_t skip = static_cast<std::size_t>(it - avail.begin());
      // A lone trailing first-magic byte might pair with the next chunk.
      if (it == avail.end() && avail.back() == kMagicBytes[0]) skip = avail.size() - 1;
      diag_.skipped_bytes += skip;
      pos_ += skip;
      continue;
    }

    if (avail.size() < kFrameHeaderSize) break;

    const std::uint8_t version = avail[2];
    const auto raw_type = wire::GetLe<std::uint16_t>(avail, 3);
    const auto payload_len = wire::GetLe<std::uint16_t>(avail, 13);
    const auto expected = ExpectedPayloadSize(static_cast<MsgType>(raw_type));
    if (version != kFrameVersion || (expected && *expected != payload_len)) {
      ++diag_.bad_header;
      ++diag_.skipped_bytes;
      ++pos_;
      continue;
    }

    const std::size_t frame_len = kFrameOverhead + payload_len;
    if (avail.size() < frame_len) break;

    const std::uint16_t crc = Crc16CcittFalse(avail.first(kFrameHeaderSize + payload_len));
    const auto wire_crc = wire::GetLe<std::uint16_t>(avail, kFrameHeaderSize + payload_len);
    if (crc != wire_crc) {
      ++diag_.crc_errors;
      ++diag_.skipped_bytes;
      ++pos_;
      continue;
    }

    if (!expected) {
      ++diag_.unknown_type;
      pos_ += frame_len;
      continue;
    }

    DiagFrame frame;
    frame.msg_type = static_cast<MsgType>(raw_type);
    frame.timestamp_us = wire::GetLe<std::uint64_t>(avail, 5);
    const auto payload = avail.subspan(kFrameHeaderSize, payload_len);
    frame.payload.assign(payload.begin(), payload.end());
    out.push_back(std::move(frame));
    ++diag_.frames;
    pos_ += frame_len;
  }

  Compact();
}

void FrameDecoder::Compact() {
  if (pos_ == 0) return;
  buf_.erase(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(pos_));
  pos_ = 0;
}

}  // namespace kpicc
