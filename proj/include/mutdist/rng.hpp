#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace mutdist {

/// Philox4x32-10 block function (Salmon et al., SC'11).
[[nodiscard]] constexpr std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                                                std::array<std::uint32_t, 2> key) noexcept {
  constexpr std::uint64_t kM0 = 0xD2511F53u;
  constexpr std::uint64_t kM1 = 0xCD9E8D57u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = kM0 * ctr[0];
    const std::uint64_t p1 = kM1 * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    key[0] += 0x9E3779B9u;
    key[1] += 0xBB67AE85u;
  }
  return ctr;
}

/// Counter-based random stream. The key is the 64-bit seed, the upper counter
/// half is the stream id (sample index) and the lower half counts blocks, so
/// a (seed, stream_id) pair always replays the same sequence.
///
/// Satisfies UniformRandomBitGenerator.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept : seed_(seed), stream_id_(stream_id) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    if (buffered_ == 0) refill();
    --buffered_;
    return buffer_[buffered_];
  }

  /// Uniform on (0, 1): never returns 0 or 1.
  double uniform_open() noexcept { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1p-53; }

  /// Uniform on [0, 1).
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1p-53; }

  /// Standard exponential variate.
  double exponential() noexcept { return -std::log(uniform_open()); }

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] std::uint64_t stream_id() const noexcept { return stream_id_; }

 private:
  void refill() noexcept {
    const auto out = philox4x32(
        {static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
         static_cast<std::uint32_t>(stream_id_), static_cast<std::uint32_t>(stream_id_ >> 32)},
        {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
    ++block_;
    // Served from the back, so word pair (0,1) comes out first.
    buffer_[1] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
    buffer_[0] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
    buffered_ = 2;
  }

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
};

}  // namespace mutdist
