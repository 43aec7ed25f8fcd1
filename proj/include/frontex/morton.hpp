#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace frontex {

/// 63-bit z-order key, 21 bits per axis. Bit i of x goes to bit 3i, y to
/// 3i+1, z to 3i+2.
using MortonCode = std::uint64_t;

inline constexpr std::uint32_t kMortonAxisBits = 21;
inline constexpr std::uint32_t kMortonAxisLimit = 1u << kMortonAxisBits;

namespace detail {

constexpr std::uint64_t spread_bits(std::uint64_t v) {
  v &= 0x1fffff;
  v = (v | v << 32) & 0x1f00000000ffffULL;
  v = (v | v << 16) & 0x1f0000ff0000ffULL;
  v = (v | v << 8) & 0x100f00f00f00f00fULL;
  v = (v | v << 4) & 0x10c30c30c30c30c3ULL;
  v = (v | v << 2) & 0x1249249249249249ULL;
  return v;
}

constexpr std::uint32_t compact_bits(std::uint64_t v) {
  v &= 0x1249249249249249ULL;
  v = (v ^ (v >> 2)) & 0x10c30c30c30c30c3ULL;
  v = (v ^ (v >> 4)) & 0x100f00f00f00f00fULL;
  v = (v ^ (v >> 8)) & 0x1f0000ff0000ffULL;
  v = (v ^ (v >> 16)) & 0x1f00000000ffffULL;
  v = (v ^ (v >> 32)) & 0x1fffffULL;
  return static_cast<std::uint32_t>(v);
}

}  // namespace detail

/// Unchecked interleave; callers guarantee coordinates below 2^21.
constexpr MortonCode morton_encode_unchecked(std::uint32_t x, std::uint32_t y,
                                             std::uint32_t z) {
  return detail::spread_bits(x) | (detail::spread_bits(y) << 1) |
         (detail::spread_bits(z) << 2);
}

inline MortonCode morton_encode(std::uint32_t x, std::uint32_t y, std::uint32_t z) {
  if (x >= kMortonAxisLimit || y >= kMortonAxisLimit || z >= kMortonAxisLimit) {
    throw std::out_of_range("morton_encode: coordinate exceeds 21 bits (" +
                            std::to_string(x) + ", " + std::to_string(y) + ", " +
                            std::to_string(z) + ")");
  }
  return morton_encode_unchecked(x, y, z);
}

struct MortonCoords {
  std::uint32_t x = 0;
  std::uint32_t y = 0;
  std::uint32_t z = 0;
  friend bool operator==(const MortonCoords&, const MortonCoords&) = default;
};

constexpr MortonCoords morton_decode(MortonCode code) {
  return {detail::compact_bits(code), detail::compact_bits(code >> 1),
          detail::compact_bits(code >> 2)};
}

}  // namespace frontex
