#include "mebns/rng.hpp"

#include <cmath>

namespace mebns {

double Rng::gaussian() {
  const double u1 = uniform_open();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * 3.14159265358979323846 * u2);
}

double Rng::truncated_gaussian01() {
  // Acceptance probability is ~34%, so a handful of draws suffices; the
  // loop is unbounded in theory but terminates almost surely.
  for (;;) {
    const double z = gaussian();
    if (z >= 0.0 && z <= 1.0) return z;
  }
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream,
                       std::uint64_t index) {
  std::uint64_t h = splitmix64(seed ^ (stream * 0xd6e8feb86659fd93ULL));
  h = splitmix64(h ^ (index * 0xa5a5a5a5a5a5a5a5ULL));
  return h;
}

}  // namespace mebns
