#pragma once

// Wire format of the emulated modem diagnostic channel.
//
// All multi-byte integers are little-endian.
//
//   offset  size  field
//   0       2     magic 0x7E44
//   2       1     version 0x01
//   3       2     msg_type
//   5       8     timestamp_us
//   13      2     payload_len
//   15      N     payload
//   15+N    2     crc16 (CCITT-FALSE over bytes [0, 15+N))
//
// Known payloads are fixed-size records; see the *Record structs below.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "kpicc/units.h"

namespace kpicc {

enum class MsgType : std::uint16_t {
  kDciGrant = 0x0001,
  kGrantedBytes = 0x0002,
  kCellMeas = 0x0003,
};

inline constexpr std::uint16_t kFrameMagic = 0x7E44;
inline constexpr std::uint8_t kFrameVersion = 0x01;
inline constexpr std::size_t kFrameHeaderSize = 15;
inline constexpr std::size_t kFrameCrcSize = 2;
inline constexpr std::size_t kFrameOverhead = kFrameHeaderSize + kFrameCrcSize;
inline constexpr std::size_t kMaxPayloadSize = 65535;

inline constexpr std::uint16_t kMaxPrb = 273;
inline constexpr std::uint8_t kMaxTbsIndex = 26;
inline constexpr Micros kTti5g{500};
inline constexpr Micros kTti4g{1000};

// One scheduling grant for one component carrier in one TTI.
struct DciGrant {
  std::uint8_t carrier_id = 0;
  Direction direction = Direction::kUplink;
  std::uint16_t prb = 0;
  std::uint8_t tbs_index = 0;
  std::uint8_t mimo_layers = 1;
  Micros tti = kTti4g;

  bool operator==(const DciGrant&) const = default;
};

bool IsValid(const DciGrant& grant);

// MAC-layer summary of grants over a window.
struct GrantedBytesReport {
  Micros window = milliseconds{100};
  std::uint32_t bytes_granted = 0;
  std::uint32_t bytes_used = 0;

  bool operator==(const GrantedBytesReport&) const = default;
};

// Serving-cell measurement (RSRP in hundredths of a dBm).
struct CellMeas {
  std::int32_t rsrp_centi_dbm = 0;
  std::uint16_t cell_id = 0;

  bool operator==(const CellMeas&) const = default;
};

inline constexpr std::size_t kDciGrantPayloadSize = 8;
inline constexpr std::size_t kGrantedBytesPayloadSize = 12;
inline constexpr std::size_t kCellMeasPayloadSize = 6;

struct DiagFrame {
  MsgType msg_type = MsgType::kCellMeas;
  std::uint64_t timestamp_us = 0;
  std::vector<std::uint8_t> payload;

  bool operator==(const DiagFrame&) const = default;
};

// Fixed payload size for a known message type, nullopt for unknown types.
std::optional<std::size_t> ExpectedPayloadSize(MsgType type);
bool IsKnownMsgType(std::uint16_t raw);

// Throws EncodeError when the payload exceeds kMaxPayloadSize.
std::vector<std::uint8_t> EncodeFrame(const DiagFrame& frame);
void AppendEncodedFrame(const DiagFrame& frame, std::vector<std::uint8_t>& out);

DiagFrame MakeFrame(const DciGrant& grant, std::uint64_t timestamp_us);
DiagFrame MakeFrame(const GrantedBytesReport& report, std::uint64_t timestamp_us);
DiagFrame MakeFrame(const CellMeas& meas, std::uint64_t timestamp_us);

// Typed payload accessors. Return nullopt when the frame type or payload size
// does not match.
std::optional<DciGrant> ParseDciGrant(const DiagFrame& frame);
std::optional<GrantedBytesReport> ParseGrantedBytes(const DiagFrame& frame);
std::optional<CellMeas> ParseCellMeas(const DiagFrame& frame);

namespace wire {

inline void PutU8(std::vector<std::uint8_t>& out, std::uint8_t v) { out.push_back(v); }

template <typename T>
void PutLe(std::vector<std::uint8_t>& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<std::uint8_t>(static_cast<std::uint64_t>(v) >> (8 * i)));
  }
}

template <typename T>
T GetLe(std::span<const std::uint8_t> in, std::size_t offset) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    v |= static_cast<std::uint64_t>(in[offset + i]) << (8 * i);
  }
  return static_cast<T>(v);
}

}  // namespace wire
}  // namespace kpicc
