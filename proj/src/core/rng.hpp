// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

namespace weylab {

// Counter-based generator: every draw is a pure function of (seed, stream, counter).
inline std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t hash_draw(std::uint64_t seed, std::uint64_t stream,
                               std::uint64_t counter) noexcept {
  return mix64(mix64(seed ^ mix64(stream + 0x632be59bd9b4e019ULL)) + counter);
}

inline double unit_draw(std::uint64_t seed, std::uint64_t stream,
                        std::uint64_t counter) noexcept {
  return static_cast<double>(hash_draw(seed, stream, counter) >> 11) * 0x1.0p-53;
}

class CounterStream {
 public:
  CounterStream(std::uint64_t seed, std::uint64_t stream) noexcept
      : seed_(seed), stream_(stream) {}
  double uniform() noexcept { return unit_draw(seed_, stream_, counter_++); }
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

}  // namespace weylab
