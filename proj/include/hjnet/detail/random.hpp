#pragma once

#include <cstdint>
#include <random>

namespace hjnet::detail {

// The standard distributions are implementation-defined; outputs of the
// experiments must be reproducible byte for byte, so draw from the raw engine.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace hjnet::detail
