#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "kpicc/diag_frame.h"

namespace kpicc {

struct DecodeDiagnostics {
  std::uint64_t frames = 0;          // frames emitted
  std::uint64_t crc_errors = 0;      // well-framed but CRC mismatch
  std::uint64_t unknown_type = 0;    // CRC-valid frames with an unknown msg_type
  std::uint64_t bad_header = 0;      // bad version or length for a known type
  std::uint64_t skipped_bytes = 0;   // bytes discarded while hunting for magic

  std::uint64_t errors() const { return crc_errors + unknown_type + bad_header; }
  bool operator==(const DecodeDiagnostics&) const = default;
};

// Incremental decoder for the diag byte stream. Holds an incomplete tail
// between calls, so any chunking of the input yields the same frames and the
// same diagnostics. On a bad header or CRC mismatch it advances one byte and
// scans forward for the next magic.
class FrameDecoder {
 public:
  void Feed(std::span<const std::uint8_t> bytes, std::vector<DiagFrame>& out);
  std::vector<DiagFrame> Feed(std::span<const std::uint8_t> bytes);

  const DecodeDiagnostics& diagnostics() const { return diag_; }
  std::size_t pending_bytes() const { return buf_.size() - pos_; }

 private:
  void Compact();

  std::vector<std::uint8_t> buf_;
  std::size_t pos_ = 0;
  DecodeDiagnostics diag_;
};

}  // namespace kpicc
