#include "kpicc/tput_table.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <string>
#include <string_view>

#include <fmt/format.h>

#include "kpicc/error.h"

namespace kpicc {
namespace {

constexpr std::size_t kTbsCount = kMaxTbsIndex + 1;
constexpr std::size_t kPrbCount = kMaxPrb + 1;

}  // namespace

TputTable::TputTable(Direction direction, std::vector<std::uint32_t> bits)
    : direction_(direction), bits_(std::move(bits)) {}

std::size_t TputTable::Offset(std::uint16_t prb, std::uint8_t tbs_index) {
  return static_cast<std::size_t>(prb) * kTbsCount + tbs_index;
}

TputTable TputTable::Default(Direction direction) {
  std::vector<std::uint32_t> bits(kPrbCount * kTbsCount);
  for (std::uint16_t prb = 0; prb <= kMaxPrb; ++prb) {
    for (std::uint8_t tbs = 0; tbs <= kMaxTbsIndex; ++tbs) {
      bits[Offset(prb, tbs)] = static_cast<std::uint32_t>(prb) * 24u * (tbs + 1u);
    }
  }
  return TputTable(direction, std::move(bits));
}

TputTable TputTable::ReadCsv(std::istream& in, Direction direction) {
  std::vector<std::optional<std::uint32_t>> cells(kPrbCount * kTbsCount);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.starts_with("prb")) continue;
    unsigned prb = 0, tbs = 0;
    std::uint32_t value = 0;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    auto r1 = std::from_chars(p, end, prb);
    if (r1.ec != std::errc{} || r1.ptr == end || *r1.ptr != ',') {
      throw ValidationError(fmt::format("table line {}: malformed row", line_no));
    }
    auto r2 = std::from_chars(r1.ptr + 1, end, tbs);
    if (r2.ec != std::errc{} || r2.ptr == end || *r2.ptr != ',') {
      throw ValidationError(fmt::format("table line {}: malformed row", line_no));
    }
    auto r3 = std::from_chars(r2.ptr + 1, end, value);
    if (r3.ec != std::errc{} || r3.ptr != end) {
      throw ValidationError(fmt::format("table line {}: malformed row", line_no));
    }
    if (prb > kMaxPrb || tbs > kMaxTbsIndex) {
      throw ValidationError(fmt::format("table line {}: cell ({},{}) out of range", line_no,
                                        prb, tbs));
    }
    if (prb == 0) {
      if (value != 0) {
        throw ValidationError(fmt::format("table cell ({},{}) must be 0", prb, tbs));
      }
      continue;
    }
    auto& cell = cells[Offset(static_cast<std::uint16_t>(prb), static_cast<std::uint8_t>(tbs))];
    if (cell) {
      throw ValidationError(fmt::format("table cell ({},{}) defined twice", prb, tbs));
    }
    cell = value;
  }

  std::vector<std::uint32_t> bits(kPrbCount * kTbsCount, 0);
  for (std::uint16_t prb = 1; prb <= kMaxPrb; ++prb) {
    for (std::uint8_t tbs = 0; tbs <= kMaxTbsIndex; ++tbs) {
      const auto& cell = cells[Offset(prb, tbs)];
      if (!cell) throw ValidationError(fmt::format("table cell ({},{}) is missing", prb, tbs));
      bits[Offset(prb, tbs)] = *cell;
    }
  }
  for (std::uint16_t prb = 1; prb <= kMaxPrb; ++prb) {
    for (std::uint8_t tbs = 0; tbs <= kMaxTbsIndex; ++tbs) {
      const std::uint32_t v = bits[Offset(prb, tbs)];
      const bool prb_drop = prb > 1 && v < bits[Offset(prb - 1, tbs)];
      const bool tbs_drop = tbs > 0 && v < bits[Offset(prb, tbs - 1)];
      if (prb_drop || tbs_drop) {
        throw ValidationError(fmt::format("table cell ({},{}) is not monotone", prb, tbs));
      }
    }
  }
  return TputTable(direction, std::move(bits));
}

TputTable TputTable::Load(const std::filesystem::path& path, Direction direction) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open table file " + path.string());
  return ReadCsv(in, direction);
}

std::uint32_t TputTable::Bits(std::uint16_t prb, std::uint8_t tbs_index) const {
  return bits_[Offset(std::min<std::uint16_t>(prb, kMaxPrb),
                      std::min<std::uint8_t>(tbs_index, kMaxTbsIndex))];
}

std::uint16_t TputTable::NearestPrb(double target_bits, std::uint8_t tbs_index,
                                    std::uint8_t mimo_layers) const {
  if (target_bits <= 0 || mimo_layers == 0) return 0;
  const double per_layer = target_bits / mimo_layers;
  // First PRB whose entry reaches the target; compare with its predecessor.
  std::uint16_t lo = 0, hi = kMaxPrb;
  if (Bits(hi, tbs_index) < per_layer) return kMaxPrb;
  while (lo < hi) {
    const std::uint16_t mid = static_cast<std::uint16_t>((lo + hi) / 2);
    if (Bits(mid, tbs_index) < per_layer) {
      lo = static_cast<std::uint16_t>(mid + 1);
    } else {
      hi = mid;
    }
  }
  if (lo == 0) return 0;
  const double above = Bits(lo, tbs_index) - per_layer;
  const double below = per_layer - Bits(static_cast<std::uint16_t>(lo - 1), tbs_index);
  return below < above ? static_cast<std::uint16_t>(lo - 1) : lo;
}

}  // namespace kpicc
