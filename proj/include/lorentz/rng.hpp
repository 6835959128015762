#pragma once

#include <cstdint>
#include <random>

#include "lorentz/geometry.hpp"

namespace lorentz {

/// SplitMix64 step; used only to decorrelate stream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic per-replica engine: the pair (master, stream) fully
/// determines the stream, independent of how work is scheduled.
inline std::mt19937_64 stream_engine(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t s = master;
    (void)splitmix64(s);
    s ^= 0xd1b54a32d192ed03ULL * (stream + 1);
    const std::uint64_t seed = splitmix64(s);
    return std::mt19937_64(seed);
}

/// Uniform direction on the sphere of the given radius.
template <class Rng>
Vec sample_sphere(int dim, double radius, Rng& rng) {
    if (dim == 2) {
        std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
        const double phi = u(rng);
        return make_vec(radius * std::cos(phi), radius * std::sin(phi));
    }
    std::normal_distribution<double> n(0.0, 1.0);
    for (;;) {
        Vec g = make_vec(n(rng), n(rng), n(rng));
        const double r = norm(g);
        if (r > 1e-12) return g * (radius / r);
    }
}

} // namespace lorentz
