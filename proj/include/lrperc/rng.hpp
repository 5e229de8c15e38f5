#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace lrp {

/// Philox4x32-10 block function (Salmon et al., SC'11). Stateless: the output depends
/// only on (key, counter).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

/// Purpose tags occupying the top counter word, so that independent uses of the same
/// (seed, replica, index) never share random words.
enum class StreamTag : std::uint32_t {
  kSpacing = 1,
  kPairChoice = 2,
  kBootstrap = 3,
  kTest = 4,
};

/// A counter-based stream keyed by (seed, replica, index, tag). Two streams with the
/// same key produce identical sequences regardless of which thread draws them.
/// Satisfies UniformRandomBitGenerator.
class KeyedStream {
 public:
  using result_type = std::uint64_t;

  KeyedStream(std::uint64_t seed, std::uint32_t replica, std::uint32_t index, StreamTag tag) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        replica_(replica),
        index_(index),
        tag_(static_cast<std::uint32_t>(tag)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    if (avail_ == 0) refill();
    const auto hi = static_cast<std::uint64_t>(buf_[4 - avail_]);
    const auto lo = static_cast<std::uint64_t>(buf_[5 - avail_]);
    avail_ -= 2;
    return (hi << 32) | lo;
  }

  /// Uniform on [0,1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Standard exponential variate.
  double exponential() noexcept { return -std::log1p(-uniform()); }

  /// Uniform integer on [0, bound), bound >= 1. Unbiased (Lemire's rejection).
  std::uint64_t below(std::uint64_t bound) noexcept;

 private:
  // Counter layout: word0 = block low bits, word1 = tag (top 8 bits) | block high bits,
  // word2 = index, word3 = replica.
  void refill() noexcept {
    buf_ = philox4x32({static_cast<std::uint32_t>(block_),
                       (tag_ << 24) | static_cast<std::uint32_t>((block_ >> 32) & 0xffffffu), index_,
                       replica_},
                      key_);
    ++block_;
    avail_ = 4;
  }

  std::array<std::uint32_t, 2> key_;
  std::uint32_t replica_;
  std::uint32_t index_;
  std::uint32_t tag_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int avail_ = 0;
};

}  // namespace lrp
