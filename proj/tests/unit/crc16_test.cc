#include <gtest/gtest.h>

#include <random>
#include <string_view>
#include <vector>

#include "kpicc/crc16.h"

namespace kpicc {
namespace {

// Bit-at-a-time reference, written straight from the polynomial definition.
std::uint16_t ReferenceCrc(std::span<const std::uint8_t> data) {
  std::uint16_t crc = 0xFFFF;
  for (std::uint8_t byte : data) {
    for (int bit = 7; bit >= 0; --bit) {
      const bool in = (byte >> bit) & 1;
      const bool top = crc & 0x8000;
      crc = static_cast<std::uint16_t>(crc << 1);
      if (in != top) crc ^= 0x1021;
    }
  }
  return crc;
}

std::vector<std::uint8_t> Bytes(std::string_view s) { return {s.begin(), s.end()}; }

TEST(Crc16, CheckValue) {
  const auto data = Bytes("123456789");
  EXPECT_EQ(ReferenceCrc(data), 0x29B1);
  EXPECT_EQ(Crc16CcittFalse(data), 0x29B1);
}

TEST(Crc16, EmptyInputIsInitialValue) { EXPECT_EQ(Crc16CcittFalse({}), 0xFFFF); }

TEST(Crc16, MatchesBitwiseReferenceOnRandomData) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::uint8_t> data(rng() % 300);
    for (auto& b : data) b = static_cast<std::uint8_t>(rng());
    ASSERT_EQ(Crc16CcittFalse(data), ReferenceCrc(data)) << "length " << data.size();
  }
}

TEST(Crc16, IncrementalEqualsOneShot) {
  const auto data = Bytes("the quick brown fox");
  const std::span<const std::uint8_t> all(data);
  const auto head = Crc16CcittFalse(all.first(7));
  EXPECT_EQ(Crc16CcittFalse(all.subspan(7), head), Crc16CcittFalse(all));
}

}  // namespace
}  // namespace kpicc
