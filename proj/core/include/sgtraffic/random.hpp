#pragma once

#include <cstdint>
#include <random>

namespace sgtraffic {

/// Seeded uniform [0,1) source whose output depends only on the seed
/// (std::uniform_real_distribution is implementation-defined).
class UniformSource {
 public:
  explicit UniformSource(std::uint64_t seed) : engine_(seed) {}

  double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double next(double lo, double hi) { return lo + (hi - lo) * next(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace sgtraffic
