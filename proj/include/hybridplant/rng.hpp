#pragma once

#include <cstdint>
#include <random>

namespace hybridplant::detail {

// Fixed-layout uniform in [0,1) from the raw 64-bit stream, so draw
// sequences are identical across standard-library implementations.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace hybridplant::detail
