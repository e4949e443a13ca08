#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace dq {

// Engine for one purpose-labelled stream. Streams are pure functions of
// (master seed, replicate, label) so adding consumers never shifts others.
using Engine = std::mt19937_64;

std::uint64_t fnv1a(std::string_view text);
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t replicate, std::string_view label);
Engine make_stream(std::uint64_t master, std::uint64_t replicate, std::string_view label);

// Local draws so results do not depend on the standard library's
// distribution implementations.
double uniform01(Engine& eng);  // [0, 1)
double uniform(Engine& eng, double lo, double hi);
double standard_normal(Engine& eng);
std::uint64_t uniform_index(Engine& eng, std::uint64_t n);  // [0, n)

}  // namespace dq
