#pragma once

#include <cstdint>
#include <random>

namespace npmix {

/// Uniform(0,1) draw built directly from the generator's 53 high bits, so
/// streams are bit-identical across standard libraries. Zero is remapped
/// away from the closed endpoint.
inline double uniform01(std::mt19937_64& rng) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return u > 0.0 ? u : 0x1.0p-53;
}

}  // namespace npmix
