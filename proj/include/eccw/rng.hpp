#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace eccw {

using Rng = std::mt19937_64;

// splitmix64 step; good enough to derive independent stream seeds
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic sub-seed from a master seed and stream coordinates, so a
// worker can reproduce any (epoch, batch) or (snr, chunk) stream on its own.
inline std::uint64_t mix_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> parts) {
    std::uint64_t h = splitmix64(seed);
    for (auto p : parts) h = splitmix64(h ^ p);
    return h;
}

inline double uniform01(Rng& rng) {
    // 53-bit mantissa, shifted into the open interval (0,1): log() stays finite
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// Box-Muller, spelled out rather than taken from <random> so that the value
// stream depends only on the mt19937_64 output and not on the standard
// library's distribution internals.
class GaussianSampler {
public:
    double operator()(Rng& rng) {
        if (have_) {
            have_ = false;
            return spare_;
        }
        double u1 = uniform01(rng);
        double u2 = uniform01(rng);
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_ = true;
        return r * std::cos(a);
    }

private:
    bool have_ = false;
    double spare_ = 0.0;
};

} // namespace eccw
