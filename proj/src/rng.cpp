#include "dataquote/rng.hpp"

#include <cmath>
#include <numbers>

namespace dq {

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t replicate, std::string_view label) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ replicate);
  return splitmix64(h ^ fnv1a(label));
}

Engine make_stream(std::uint64_t master, std::uint64_t replicate, std::string_view label) {
  return Engine(derive_seed(master, replicate, label));
}

double uniform01(Engine& eng) { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }

double uniform(Engine& eng, double lo, double hi) { return lo + (hi - lo) * uniform01(eng); }

double standard_normal(Engine& eng) {
  // Box-Muller, one variate per call keeps the stream position simple.
  double u1 = uniform01(eng);
  double u2 = uniform01(eng);
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t uniform_index(Engine& eng, std::uint64_t n) {
  // Rejection sampling avoids modulo bias.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t r;
  do {
    r = eng();
  } while (r >= limit);
  return r % n;
}

}  // namespace dq
