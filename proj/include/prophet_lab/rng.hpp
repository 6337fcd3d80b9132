#ifndef PROPHET_LAB_RNG_HPP
#define PROPHET_LAB_RNG_HPP

#include <cstdint>

namespace prophet_lab {

// Counter-based stream: the state is a pure function of (seed, trial, element),
// so trial t of a Monte Carlo run sees the same draws no matter how trials are
// scheduled across threads.
class RngStream {
 public:
  explicit RngStream(uint64_t state) : state_(state) {}

  static RngStream keyed(uint64_t seed, uint64_t trial, uint64_t element) {
    uint64_t h = seed ^ 0x243f6a8885a308d3ULL;
    h = mix(h + 0x9e3779b97f4a7c15ULL * (trial + 1));
    h = mix(h + 0x9e3779b97f4a7c15ULL * (element + 1));
    return RngStream(h);
  }

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    return mix(z);
  }

  // Uniform in [0, 1), 53-bit mantissa.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in {0, ..., n-1}.
  uint64_t next_below(uint64_t n) { return next_u64() % n; }

 private:
  static uint64_t mix(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  uint64_t state_;
};

}  // namespace prophet_lab

#endif
