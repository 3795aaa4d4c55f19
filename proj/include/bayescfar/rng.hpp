#pragma once

#include <cstdint>
#include <random>

namespace bcfar {

// SplitMix64 finalizer applied to (master, stream). Distinct stream ids give
// statistically unrelated 64-bit sub-seeds for the same master seed.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t stream_id) noexcept;

// Single-owner random stream. The engine and the uniform conversion are both
// fully specified, so a (seed, stream) pair produces the same draws on every
// platform and standard library.
class RngStream {
public:
    explicit RngStream(std::uint64_t master_seed, std::uint64_t stream_id = 0);

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on the open interval (0, 1): (m + 1/2) / 2^53 for a 53-bit m.
    double uniform_open();

private:
    std::mt19937_64 engine_;
};

}  // namespace bcfar
