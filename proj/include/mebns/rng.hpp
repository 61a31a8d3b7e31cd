#pragma once

#include <cstdint>
#include <random>

namespace mebns {

// All randomness in the library flows through this wrapper so results are
// reproducible bit-for-bit from a single master seed. Distribution sampling
// is hand-rolled (std::uniform_real_distribution & friends are not pinned
// across standard library versions).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1); safe to feed into log().
  double uniform_open() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform index in [0, n); n must be positive.
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(next() % n);
  }

  // Standard normal via Box-Muller (no cached spare: one fresh value per
  // call keeps consumption patterns easy to reason about).
  double gaussian();

  // Standard normal conditioned on [0, 1], by rejection.
  double truncated_gaussian01();

 private:
  std::mt19937_64 gen_;
};

// Derives an independent stream seed from (master seed, stream tag, index).
// Used to give every consumer - splitting, init, per-epoch sampling, each
// per-positive substream, DropEdge draws, eval pools - its own stream so
// adding a consumer never shifts another one's values.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream,
                       std::uint64_t index = 0);

// Stream tags. Arbitrary distinct constants; frozen because checkpointed
// runs must replay identically.
namespace stream {
inline constexpr std::uint64_t split = 1;
inline constexpr std::uint64_t teacher_init = 2;
inline constexpr std::uint64_t meta_init = 3;
inline constexpr std::uint64_t epoch_negatives = 4;    // index = global epoch
inline constexpr std::uint64_t sample_draw = 5;        // index = positive index
inline constexpr std::uint64_t sample_coin = 6;        // index = positive index
inline constexpr std::uint64_t dropedge_rho = 7;       // index = draw number
inline constexpr std::uint64_t dropedge_mask = 8;      // index = draw number
inline constexpr std::uint64_t meta_pool = 9;
inline constexpr std::uint64_t valid_auc_pool = 10;
inline constexpr std::uint64_t valid_hits_pool = 11;
inline constexpr std::uint64_t test_auc_pool = 12;
inline constexpr std::uint64_t test_hits_pool = 13;
inline constexpr std::uint64_t probe_negatives = 14;
inline constexpr std::uint64_t landscape = 15;
inline constexpr std::uint64_t dataset = 16;
}  // namespace stream

}  // namespace mebns
