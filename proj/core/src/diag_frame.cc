#include "kpicc/diag_frame.h"

#include <string>

#include "kpicc/crc16.h"
#include "kpicc/error.h"

namespace kpicc {

bool IsValid(const DciGrant& grant) {
  const bool mimo_ok =
      grant.mimo_layers == 1 || grant.mimo_layers == 2 || grant.mimo_layers == 4;
  const bool tti_ok = grant.tti == kTti5g || grant.tti == kTti4g;
  return grant.prb <= kMaxPrb && grant.tbs_index <= kMaxTbsIndex && mimo_ok && tti_ok;
}

std::optional<std::size_t> ExpectedPayloadSize(MsgType type) {
  switch (type) {
    case MsgType::kDciGrant:
      return kDciGrantPayloadSize;
    case MsgType::kGrantedBytes:
      return kGrantedBytesPayloadSize;
    case MsgType::kCellMeas:
      return kCellMeasPayloadSize;
  }
  return std::nullopt;
}

bool IsKnownMsgType(std::uint16_t raw) {
  return ExpectedPayloadSize(static_cast<MsgType>(raw)).has_value();
}

void AppendEncodedFrame(const DiagFrame& frame, std::vector<std::uint8_t>& out) {
  if (frame.payload.size() > kMaxPayloadSize) {
    throw EncodeError("payload of " + std::to_string(frame.payload.size()) +
                      " bytes exceeds the 65535-byte limit");
  }
  const std::size_t start = out.size();
  out.reserve(start + kFrameOverhead + frame.payload.size());
  wire::PutLe<std::uint16_t>(out, kFrameMagic);
  wire::PutU8(out, kFrameVersion);
  wire::PutLe<std::uint16_t>(out, static_cast<std::uint16_t>(frame.msg_type));
  wire::PutLe<std::uint64_t>(out, frame.timestamp_us);
  wire::PutLe<std::uint16_t>(out, static_cast<std::uint16_t>(frame.payload.size()));
  out.insert(out.end(), frame.payload.begin(), frame.payload.end());
  const std::uint16_t crc =
      Crc16CcittFalse(std::span<const std::uint8_t>(out).subspan(start));
  wire::PutLe<std::uint16_t>(out, crc);
}

std::vector<std::uint8_t> EncodeFrame(const DiagFrame& frame) {
  std::vector<std::uint8_t> out;
  AppendEncodedFrame(frame, out);
  return out;
}

DiagFrame MakeFrame(const DciGrant& grant, std::uint64_t timestamp_us) {
  DiagFrame f{MsgType::kDciGrant, timestamp_us, {}};
  f.payload.reserve(kDciGrantPayloadSize);
  wire::PutU8(f.payload, grant.carrier_id);
  wire::PutU8(f.payload, static_cast<std::uint8_t>(grant.direction));
  wire::PutLe<std::uint16_t>(f.payload, grant.prb);
  wire::PutU8(f.payload, grant.tbs_index);
  wire::PutU8(f.payload, grant.mimo_layers);
  wire::PutLe<std::uint16_t>(f.payload, static_cast<std::uint16_t>(grant.tti.count()));
  return f;
}

DiagFrame MakeFrame(const GrantedBytesReport& report, std::uint64_t timestamp_us) {
  DiagFrame f{MsgType::kGrantedBytes, timestamp_us, {}};
  f.payload.reserve(kGrantedBytesPayloadSize);
  wire::PutLe<std::uint32_t>(f.payload, static_cast<std::uint32_t>(report.window.count()));
  wire::PutLe<std::uint32_t>(f.payload, report.bytes_granted);
  wire::PutLe<std::uint32_t>(f.payload, report.bytes_used);
  return f;
}

DiagFrame MakeFrame(const CellMeas& meas, std::uint64_t timestamp_us) {
  DiagFrame f{MsgType::kCellMeas, timestamp_us, {}};
  f.payload.reserve(kCellMeasPayloadSize);
  wire::PutLe<std::uint32_t>(f.payload, static_cast<std::uint32_t>(meas.rsrp_centi_dbm));
  wire::PutLe<std::uint16_t>(f.payload, meas.cell_id);
  return f;
}

std::optional<DciGrant> ParseDciGrant(const DiagFrame& frame) {
  if (frame.msg_type != MsgType::kDciGrant || frame.payload.size() != kDciGrantPayloadSize) {
    return std::nullopt;
  }
  std::span<const std::uint8_t> p(frame.payload);
  DciGrant g;
  g.carrier_id = p[0];
  g.direction = static_cast<Direction>(p[1]);
  g.prb = wire::GetLe<std::uint16_t>(p, 2);
  g.tbs_index = p[4];
  g.mimo_layers = p[5];
  g.tti = Micros{wire::GetLe<std::uint16_t>(p, 6)};
  return g;
}

std::optional<GrantedBytesReport> ParseGrantedBytes(const DiagFrame& frame) {
  if (frame.msg_type != MsgType::kGrantedBytes ||
      frame.payload.size() != kGrantedBytesPayloadSize) {
    return std::nullopt;
  }
  std::span<const std::uint8_t> p(frame.payload);
  GrantedBytesReport r;
  r.window = Micros{wire::GetLe<std::uint32_t>(p, 0)};
  r.bytes_granted = wire::GetLe<std::uint32_t>(p, 4);
  r.bytes_used = wire::GetLe<std::uint32_t>(p, 8);
  return r;
}

std::optional<CellMeas> ParseCellMeas(const DiagFrame& frame) {
  if (frame.msg_type != MsgType::kCellMeas || frame.payload.size() != kCellMeasPayloadSize) {
    return std::nullopt;
  }
  std::span<const std::uint8_t> p(frame.payload);
  CellMeas m;
  m.rsrp_centi_dbm = wire::GetLe<std::int32_t>(p, 0);
  m.cell_id = wire::GetLe<std::uint16_t>(p, 4);
  return m;
}

}  // namespace kpicc
