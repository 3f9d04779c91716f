#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "kpicc/diag_frame.h"
#include "kpicc/units.h"

namespace kpicc {

// Bits carried per TTI per MIMO layer for a (PRB count, TBS index) pair.
// Monotone non-decreasing along both axes; zero PRBs carry zero bits.
class TputTable {
 public:
  // Synthetic default: bits = prb * 24 * (tbs_index + 1).
  static TputTable Default(Direction direction = Direction::kUplink);

  // CSV rows `prb,tbs_index,bits` (header optional) covering every cell with
  // prb in 1..273 and tbs_index in 0..26. Throws ValidationError naming the
  // first missing or non-monotone cell as "(prb,tbs)".
  static TputTable ReadCsv(std::istream& in, Direction direction = Direction::kUplink);
  static TputTable Load(const std::filesystem::path& path,
                        Direction direction = Direction::kUplink);

  std::uint32_t Bits(std::uint16_t prb, std::uint8_t tbs_index) const;
  Direction direction() const { return direction_; }

  // PRB count whose table entry times `mimo_layers` is closest to
  // `target_bits` (ties round up), clamped to [0, 273].
  std::uint16_t NearestPrb(double target_bits, std::uint8_t tbs_index,
                           std::uint8_t mimo_layers) const;

 private:
  TputTable(Direction direction, std::vector<std::uint32_t> bits);
  static std::size_t Offset(std::uint16_t prb, std::uint8_t tbs_index);

  Direction direction_ = Direction::kUplink;
  std::vector<std::uint32_t> bits_;
};

}  // namespace kpicc
