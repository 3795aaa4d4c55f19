#include "bayescfar/rng.hpp"

namespace bcfar {

namespace {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t stream_id) noexcept {
    return splitmix64(master_seed ^ splitmix64(stream_id));
}

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
    : engine_(derive_seed(master_seed, stream_id)) {}

double RngStream::uniform_open() {
    constexpr double inv_2_53 = 1.0 / 9007199254740992.0;
    const auto m = static_cast<double>(engine_() >> 11);
    return (m + 0.5) * inv_2_53;
}

}  // namespace bcfar
