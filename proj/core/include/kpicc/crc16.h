#pragma once

#include <cstdint>
#include <span>

namespace kpicc {

// CRC-16/CCITT-FALSE: poly 0x1021, init 0xFFFF, no reflection, no final xor.
std::uint16_t Crc16CcittFalse(std::span<const std::uint8_t> data,
                              std::uint16_t crc = 0xFFFF);

}  // namespace kpicc
