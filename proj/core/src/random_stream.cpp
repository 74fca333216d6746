#include "penbsde/random_stream.hpp"

#include <cmath>

namespace penbsde {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t RandomStream::nextU64() noexcept {
    const std::uint64_t key = mix(seed_ + kGolden);
    return mix(key ^ (++counter_ * kGolden));
}

double RandomStream::uniform() noexcept {
    // 53 random bits centred in their bucket: never 0, never 1.
    return (static_cast<double>(nextU64() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::exponential(double rate) noexcept {
    return -std::log(uniform()) / rate;
}

RandomStream RandomStream::substream(std::uint64_t index) const noexcept {
    return RandomStream(mix(seed_ ^ mix(index + kGolden)));
}

}  // namespace penbsde
