#include "lecam/rng.hpp"

#include "lecam/stats.hpp"

namespace lecam {

std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
}

std::uint64_t derive_key(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    std::uint64_t k = mix64(seed + 0x9e3779b97f4a7c15ull);
    k = mix64(k ^ (a + 0xd1b54a32d192ed03ull));
    k = mix64(k ^ (b + 0x8cb92ba72f3d8dd7ull));
    return k;
}

double RngStream::next_normal() { return normal_quantile(next_uniform()); }

}  // namespace lecam
