#ifndef HOMODYNE_RNG_HPP
#define HOMODYNE_RNG_HPP

#include <cstdint>
#include <random>

namespace homodyne {

// Named substream tags. Ideal sampling and detection noise always draw
// from distinct streams so X and xi independence is structural.
enum class StreamTag : std::uint64_t {
    Ideal = 1,
    Noise = 2,
    Generic = 3,
    Test = 4,
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
} // namespace detail

using RngStream = std::mt19937_64;

// Derive an independent stream from (seed, tag, index). Replicates of an
// experiment pass their replicate index here, so results do not depend on
// scheduling order.
inline RngStream make_stream(std::uint64_t seed, StreamTag tag, std::uint64_t index = 0) {
    std::uint64_t s = detail::splitmix64(seed);
    s = detail::splitmix64(s ^ static_cast<std::uint64_t>(tag));
    s = detail::splitmix64(s ^ index);
    std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32),
                      static_cast<std::uint32_t>(detail::splitmix64(s)),
                      static_cast<std::uint32_t>(detail::splitmix64(s) >> 32)};
    return RngStream(seq);
}

} // namespace homodyne

#endif
