#pragma once

#include <cstdint>
#include <random>

namespace sl2dyn {

// All randomness flows from std::mt19937_64, which is fully specified by the
// standard. Bounded draws below avoid std::uniform_int_distribution so that
// streams are identical across standard-library implementations, not just
// across runs.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t next_u64() { return gen_(); }

  // Uniform in [0, n). Unbiased via rejection from the top of the range.
  uint64_t below(uint64_t n) {
    if (n <= 1) return 0;
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return v % n;
  }

  // Uniform in [0, 1) with 53 bits of mantissa.
  double unit_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 gen_;
};

// splitmix64 finalizer; used to decorrelate derived seeds (per prime, per
// sample stream) and as the hash for open-addressed index maps.
constexpr uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace sl2dyn
