#include "dstbam/random_stream.hpp"

#include <cmath>

namespace dstbam {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

RandomStream RandomStream::derive(std::uint64_t tag) const {
  return RandomStream(seed_, mix64(key_ ^ mix64(tag)));
}

std::uint64_t RandomStream::u64_at(std::uint64_t index) const {
  const std::uint64_t block = index >> 1;
  const auto out = philox4x32(
      {static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
       static_cast<std::uint32_t>(key_), static_cast<std::uint32_t>(key_ >> 32)},
      {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
  const std::size_t w = (index & 1) * 2;
  return (static_cast<std::uint64_t>(out[w + 1]) << 32) | out[w];
}

std::uint64_t RandomStream::next_u64() { return u64_at(position_++); }

double RandomStream::next_exponential(double rate) { return -std::log(next_uniform()) / rate; }

std::uint32_t RandomStream::next_bit() {
  if (bits_left_ == 0) {
    bits_ = next_u64();
    bits_left_ = 64;
  }
  const auto bit = static_cast<std::uint32_t>(bits_ & 1u);
  bits_ >>= 1;
  --bits_left_;
  return bit;
}

std::uint32_t RandomStream::next_below(std::uint32_t bound) {
  if (bound == 2) return next_bit();
  // Lemire's nearly-divisionless method on the high 32 bits.
  const std::uint64_t threshold = (std::uint64_t{1} << 32) % bound;
  for (;;) {
    const std::uint64_t x = next_u64() >> 32;
    const std::uint64_t m = x * bound;
    if ((m & 0xFFFFFFFFu) >= threshold) return static_cast<std::uint32_t>(m >> 32);
  }
}

}  // namespace dstbam
