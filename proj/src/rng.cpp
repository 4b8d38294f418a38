#include "amil/rng.hpp"

#include <cmath>
#include <numbers>

namespace amil::rng {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ull;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ull;
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

std::uint64_t fnv1a(std::string_view s) noexcept {
    std::uint64_t h = kFnvOffset;
    for (unsigned char c : s) {
        h ^= c;
        h *= kFnvPrime;
    }
    return h;
}

} // namespace

std::uint64_t derive(std::uint64_t seed, std::string_view purpose, std::uint64_t index) noexcept {
    std::uint64_t k = mix64(seed + kGolden);
    k = mix64(k ^ fnv1a(purpose));
    return mix64(k + (index + 1) * kGolden);
}

double Stream::next_normal() noexcept {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = next_unit();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
}

std::uint64_t Stream::next_below(std::uint64_t bound) noexcept {
    // Rejection sampling over the largest multiple of bound.
    const std::uint64_t limit = bound * (~std::uint64_t{0} / bound);
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % bound;
}

std::vector<std::size_t> shuffled_indices(std::size_t n, Stream& stream) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(stream.next_below(i));
        std::swap(idx[i - 1], idx[j]);
    }
    return idx;
}

} // namespace amil::rng
