#pragma once

#include <cstdint>

namespace vbqc {

// Counter-based pseudorandom stream: draw i is a stateless bit-mix of
// (key, i), so identical seeds replay identical streams and a stream can
// be split into independent children (per party, per trial).
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(seed ^ 0x9e3779b97f4a7c15ull, stream)) {}

  std::uint64_t next_u64() { return mix(key_, counter_++); }

  // Uniform in [0, 1), 53 significant bits.
  double next_real() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  int next_bit() { return static_cast<int>(next_u64() >> 63); }

  // Uniform in [0, n): Lemire multiply-shift; bias < 2^-64, irrelevant at
  // desk-scale draw counts.
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // Independent child stream; children with distinct ids never collide
  // with each other or with the parent.
  RandomStream split(std::uint64_t child) const {
    return RandomStream(mix(key_, 0x5851f42d4c957f2dull), child + 1);
  }

  std::uint64_t key() const { return key_; }

 private:
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + (b + 1) * 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace vbqc
