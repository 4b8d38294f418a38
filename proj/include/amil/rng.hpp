#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace amil::rng {

// SplitMix64 finalizer. Full-avalanche bijection on 64 bits.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Derives an independent stream key from (seed, purpose, index). Every source
// of randomness in the library flows through this, so parallel work items get
// statistically independent streams that do not depend on scheduling order.
std::uint64_t derive(std::uint64_t seed, std::string_view purpose, std::uint64_t index = 0) noexcept;

// Counter-based generator: draw i of a stream is a pure function of
// (key, i), so regenerating a stream is always bit-identical.
class Stream {
public:
    explicit Stream(std::uint64_t key) noexcept : key_(key) {}
    Stream(std::uint64_t seed, std::string_view purpose, std::uint64_t index = 0) noexcept
        : key_(derive(seed, purpose, index)) {}

    std::uint64_t key() const noexcept { return key_; }

    std::uint64_t next_u64() noexcept {
        return mix64(key_ + (++counter_) * 0x9e3779b97f4a7c15ull);
    }

    // Uniform on the open interval (0, 1).
    double next_unit() noexcept {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; the second draw of each pair is cached.
    double next_normal() noexcept;

    // Uniform integer in [0, bound) by rejection, bound > 0.
    std::uint64_t next_below(std::uint64_t bound) noexcept;

private:
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Identity permutation of [0, n) shuffled in place with `stream`.
std::vector<std::size_t> shuffled_indices(std::size_t n, Stream& stream);

} // namespace amil::rng
