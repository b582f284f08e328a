#pragma once

// Counter-based random streams.
//
// Every random quantity in the library is a pure function of
// (seed, domain, stream index, draw position), so results do not depend on
// how work is split across threads. The block function is Philox4x32-10
// (Salmon et al., SC'11); the layout below is part of the reproducibility
// contract and is versioned by kRngContract:
//
//   key     = (seed & 0xffffffff, seed >> 32)
//   counter = (block, domain, stream & 0xffffffff, stream >> 32)
//
// A stream consumes its 32-bit words in order, four per block. 64-bit draws
// take two consecutive words (low word first).

#include <array>
#include <cstdint>

namespace cyclic {

inline constexpr const char* kRngContract = "philox4x32-10/block-domain-stream/v1";

using PhiloxBlock = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxBlock philox4x32_10(PhiloxBlock counter, PhiloxKey key) noexcept;

/// Separates the streams used for different purposes under one seed.
enum class StreamDomain : std::uint32_t {
  shift = 1,
  simulate = 2,
  derive = 3,
  permute = 4,
  monte_carlo = 5,
};

class CounterStream {
 public:
  CounterStream(std::uint64_t seed, StreamDomain domain, std::uint64_t stream) noexcept;

  std::uint32_t next_u32() noexcept;
  std::uint64_t next_u64() noexcept;

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double next_open_unit() noexcept;

  /// Uniform on {0, ..., bound-1} without modulo bias (Lemire's method).
  /// bound must be positive.
  std::uint64_t uniform_below(std::uint64_t bound) noexcept;

 private:
  void refill() noexcept;

  PhiloxKey key_;
  PhiloxBlock counter_;
  PhiloxBlock buffer_{};
  unsigned used_ = 4;
};

/// Child seed for a labelled sub-computation (replicate, iteration, ...).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t label) noexcept;

}  // namespace cyclic
