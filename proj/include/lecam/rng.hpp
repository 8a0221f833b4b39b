#pragma once

#include <cstdint>

namespace lecam {

/// splitmix64 finalizer; the basis for all key derivation and stream output.
std::uint64_t mix64(std::uint64_t z);

/// Key for an independent stream, derived so that (seed, a, b) triples map to
/// well-separated states. Replicate loops key per draw index, which makes all
/// sampled output independent of thread scheduling.
std::uint64_t derive_key(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

/// Counter-based generator: a splitmix64 walk from a derived key. Copyable,
/// no global state, identical sequence for identical key on every platform.
class RngStream {
public:
    explicit RngStream(std::uint64_t key) : state_(key) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix64(state_);
    }

    /// Uniform on the open interval (0, 1).
    double next_uniform() {
        const std::uint64_t bits = next_u64() >> 11;
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal by inverse CDF; keeps draw counts fixed per call,
    /// unlike rejection-style normal samplers.
    double next_normal();

private:
    std::uint64_t state_;
};

}  // namespace lecam
