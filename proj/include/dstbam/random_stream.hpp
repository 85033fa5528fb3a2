#pragma once

#include <array>
#include <cstdint>

namespace dstbam {

/// Philox4x32-10 block function (Salmon et al., Random123).
/// Maps a 128-bit counter under a 64-bit key to 128 pseudo-random bits.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// SplitMix64 finalizer; used to fold tags into stream keys.
std::uint64_t mix64(std::uint64_t x);

/// Counter-based random stream.
///
/// The value of draw `i` is a pure function of (seed, key, i), so a stream can
/// be replayed by copying it, read at random positions with `u64_at`, and
/// split by deriving new keys. Sequential draws and `u64_at` agree:
/// the n-th `next_u64()` on a fresh stream equals `u64_at(n)`.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t key) : seed_(seed), key_(key) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t key() const { return key_; }
  /// Index of the next 64-bit draw.
  std::uint64_t position() const { return position_; }

  /// Independent stream for a sub-task (replicate, role, node family ...).
  RandomStream derive(std::uint64_t tag) const;

  std::uint64_t u64_at(std::uint64_t index) const;
  /// Uniform in (0, 1] built from draw `index`.
  double uniform_at(std::uint64_t index) const { return to_unit(u64_at(index)); }

  std::uint64_t next_u64();
  /// Uniform in (0, 1].
  double next_uniform() { return to_unit(next_u64()); }
  /// Exp(rate) by inversion: -ln(U) / rate.
  double next_exponential(double rate = 1.0);
  /// Uniform integer in [0, bound). Bits are consumed from a cached word when
  /// bound == 2 so that binary walks cost one draw per 64 steps.
  std::uint32_t next_below(std::uint32_t bound);
  std::uint32_t next_bit();

  static double to_unit(std::uint64_t x) {
    return static_cast<double>((x >> 11) + 1) * 0x1.0p-53;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t key_;
  std::uint64_t position_ = 0;
  std::uint64_t bits_ = 0;
  int bits_left_ = 0;
};

}  // namespace dstbam
