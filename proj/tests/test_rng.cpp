#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "mebns/rng.hpp"

#include "support/stats.hpp"

using mebns::Rng;
using mebns::mix_seed;

TEST_CASE("generator core matches the pinned mt19937_64 sequence") {
  // The standard pins the 10000th output of a default-seeded (5489)
  // mt19937_64, which nails down the whole backbone of the library's
  // randomness.
  Rng rng(5489);
  std::uint64_t x = 0;
  for (int i = 0; i < 10000; ++i) x = rng.next();
  CHECK(x == 9981545732273789042ULL);
}

TEST_CASE("uniform stays in [0, 1) with a sane mean") {
  Rng rng(11);
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  // 4-sigma band around 1/2, sigma = 1/sqrt(12 n).
  const double sigma = 1.0 / std::sqrt(12.0 * n);
  CHECK(std::fabs(sum / n - 0.5) < 4.0 * sigma);
}

TEST_CASE("uniform_open never returns an endpoint") {
  Rng rng(12);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform_open();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
  }
  // The smallest representable draw is (0 + 0.5) * 2^-53, still positive,
  // so log() of any output is finite.
  CHECK(0.5 * 0x1.0p-53 > 0.0);
}

TEST_CASE("ranged uniform respects its bounds") {
  Rng rng(13);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform(-2.5, 7.0);
    REQUIRE(u >= -2.5);
    REQUIRE(u < 7.0);
  }
}

TEST_CASE("index covers [0, n) uniformly") {
  Rng rng(14);
  const std::size_t n = 10;
  const int draws = 100000;
  std::vector<int> counts(n, 0);
  for (int i = 0; i < draws; ++i) {
    const std::size_t k = rng.index(n);
    REQUIRE(k < n);
    ++counts[k];
  }
  const double expected = static_cast<double>(draws) / n;
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  CHECK(testsupport::chi_square_pvalue(chi2, static_cast<int>(n) - 1) > 0.001);
}

TEST_CASE("gaussian has roughly standard moments") {
  Rng rng(15);
  const int n = 200000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.gaussian();
    sum += z;
    sumsq += z * z;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::fabs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(var == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("truncated gaussian stays inside [0, 1]") {
  Rng rng(16);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double z = rng.truncated_gaussian01();
    REQUIRE(z >= 0.0);
    REQUIRE(z <= 1.0);
    lo = std::min(lo, z);
    hi = std::max(hi, z);
  }
  // The support is actually exercised, not collapsed to a corner.
  CHECK(lo < 0.05);
  CHECK(hi > 0.95);
}

TEST_CASE("mix_seed is a pinned pure function") {
  // Frozen values: mix_seed feeds every reproducible stream, so any change
  // to its constants would silently invalidate all replays.
  CHECK(mix_seed(0, 0, 0) == 0xa706dd2f4d197e6fULL);
  CHECK(mix_seed(42, mebns::stream::split, 0) == 0x69208a0ce2091c2eULL);
  CHECK(mix_seed(42, mebns::stream::split, 7) == 0xfe277abab1e58bc4ULL);
  CHECK(mix_seed(1, 2, 3) == mix_seed(1, 2, 3));
}

TEST_CASE("mix_seed separates streams and indices") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t stream = 1; stream <= 16; ++stream)
    for (std::uint64_t index = 0; index < 64; ++index)
      seen.insert(mix_seed(99, stream, index));
  CHECK(seen.size() == 16 * 64);  // no collisions across the library's tags

  // Different master seeds decorrelate the same (stream, index) slot.
  CHECK(mix_seed(1, 4, 0) != mix_seed(2, 4, 0));
}
