#pragma once

// Counter-based random numbers: every draw is a pure function of
// (seed, stream name, counter), so results never depend on call order or
// thread scheduling.

#include <cstdint>
#include <string_view>

namespace hplateau {

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t stream_key(std::string_view name);

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::string_view stream);

  std::uint64_t at(std::uint64_t counter) const;
  std::uint64_t next() { return at(counter_++); }
  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace hplateau
