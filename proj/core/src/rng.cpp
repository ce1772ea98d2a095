#include "hplateau/rng.hpp"

#include <cmath>
#include <numbers>

namespace hplateau {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_key(std::string_view name) {
  std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

CounterRng::CounterRng(std::uint64_t seed, std::string_view stream)
    : key_(splitmix64(seed ^ splitmix64(stream_key(stream)))) {}

std::uint64_t CounterRng::at(std::uint64_t counter) const {
  return splitmix64(key_ ^ splitmix64(counter));
}

double CounterRng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace hplateau
