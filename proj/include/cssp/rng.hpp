#pragma once

#include <cstdint>
#include <cstddef>

namespace cssp {

// Counter-based splitmix64 generator. Cheap to seed, no warm-up, and stream
// derivation is a pure function of (master_seed, stream_index), so batch
// trials get reproducible independent streams no matter how they are
// scheduled across threads.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    // Stream `index` of the generator family rooted at `master_seed`.
    static SplitMix64 stream(std::uint64_t master_seed, std::uint64_t index) {
        return SplitMix64(derive_stream(master_seed, index));
    }

    static std::uint64_t derive_stream(std::uint64_t master_seed, std::uint64_t index) {
        return fmix64(master_seed ^ fmix64(index + kGolden));
    }

    std::uint64_t next_u64() {
        state_ += kGolden;
        return fmix64(state_);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in {0, ..., n-1} by rejection; unbiased for any n >= 1.
    std::size_t next_index(std::size_t n) {
        const std::uint64_t bound = n;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return static_cast<std::size_t>(v % bound);
    }

private:
    static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

    static std::uint64_t fmix64(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t state_;
};

}  // namespace cssp
