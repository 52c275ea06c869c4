#pragma once

#include <cmath>
#include <cstdint>

namespace qghjm {

// Counter-based normals: draw (path, step) is a pure function of
// (seed, path, step), so path p step k is identical no matter how paths are
// distributed over workers.  splitmix64 is the usual stateless mixer.
namespace rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t key(std::uint64_t seed, std::uint64_t path,
                         std::uint64_t counter) {
    std::uint64_t h = splitmix64(seed ^ 0x8000000000000000ULL);
    h = splitmix64(h ^ (path * 0xD6E8FEB86659FD93ULL));
    return splitmix64(h ^ (counter * 0xA5A5A5A5A5A5A5A5ULL));
}

// uniform in (0, 1]: top 53 bits, shifted off zero
inline double to_unit(std::uint64_t x) {
    return static_cast<double>((x >> 11) + 1) * 0x1.0p-53;
}

// standard normal via Box-Muller from two counter slots (2k, 2k+1)
inline double normal(std::uint64_t seed, std::uint64_t path, std::uint64_t step) {
    const double u1 = to_unit(key(seed, path, 2 * step));
    const double u2 = to_unit(key(seed, path, 2 * step + 1));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

} // namespace rng
} // namespace qghjm
