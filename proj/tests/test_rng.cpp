#include <cmath>
#include <set>

#include "doctest.h"
#include "prophet_lab/rng.hpp"

using namespace prophet_lab;

TEST_CASE("keyed streams are deterministic") {
  RngStream a = RngStream::keyed(42, 7, 3);
  RngStream b = RngStream::keyed(42, 7, 3);
  for (int i = 0; i < 16; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("distinct keys give distinct streams") {
  std::set<uint64_t> firsts;
  for (uint64_t seed : {1ULL, 2ULL})
    for (uint64_t trial = 0; trial < 8; ++trial)
      for (uint64_t elem = 0; elem < 8; ++elem)
        firsts.insert(RngStream::keyed(seed, trial, elem).next_u64());
  CHECK(firsts.size() == 2 * 8 * 8);
}

TEST_CASE("unit draws live in [0,1) and have the right mean") {
  RngStream s = RngStream::keyed(9, 0, 0);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    double u = s.next_unit();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  // 4 sigma band around 1/2 for the mean of n uniforms.
  CHECK(std::abs(sum / n - 0.5) < 4.0 / std::sqrt(12.0 * n));
}

TEST_CASE("bounded draws stay in range and hit every residue") {
  RngStream s = RngStream::keyed(3, 1, 4);
  std::set<uint64_t> seen;
  for (int i = 0; i < 200; ++i) {
    uint64_t v = s.next_below(5);
    REQUIRE(v < 5);
    seen.insert(v);
  }
  CHECK(seen.size() == 5);
}
