#pragma once

#include <cstdint>
#include <span>

// Counter-based random streams. Every draw is a pure function of
// (key, counter), so any stream can be re-derived from its key alone and
// independent streams are cheap to spawn from a master seed.

namespace streamx::rng {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

[[nodiscard]] constexpr std::uint64_t finalize64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// One splitmix64 step applied to an arbitrary word.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    return finalize64(z + kGolden);
}

// Order-sensitive key chaining (hash-combine with a strong finalizer).
[[nodiscard]] constexpr std::uint64_t chain(std::uint64_t h, std::uint64_t v) noexcept {
    return finalize64(h ^ (v + kGolden + (h << 6) + (h >> 2)));
}

template <class It>
[[nodiscard]] constexpr std::uint64_t chain_range(std::uint64_t h, It first, It last) noexcept {
    for (; first != last; ++first) h = chain(h, static_cast<std::uint64_t>(*first));
    return h;
}

// Stream tags keep unrelated derivations (codebook, trials, samples, ...)
// in disjoint key spaces.
inline constexpr std::uint64_t kCodebookTag = 0xC0DEB00C00000001ULL;
inline constexpr std::uint64_t kTrialTag = 0x7214AA0000000002ULL;
inline constexpr std::uint64_t kSampleTag = 0x5A4D910000000003ULL;
inline constexpr std::uint64_t kPointTag = 0x9012700000000004ULL;
inline constexpr std::uint64_t kSearchTag = 0x5EA2C80000000005ULL;

// splitmix64 sequence with random access: output i is finalize64(key + i*golden).
class Stream {
  public:
    explicit constexpr Stream(std::uint64_t key) noexcept : key_(key) {}

    constexpr std::uint64_t next_u64() noexcept {
        return finalize64(key_ + kGolden * ++ctr_);
    }

    // uniform double in [0, 1)
    double next_unit() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // unbiased uniform integer in [0, bound)
    std::uint64_t next_below(std::uint64_t bound) noexcept {
        unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * bound;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < bound) {
            const std::uint64_t t = (0 - bound) % bound;
            while (lo < t) {
                m = static_cast<unsigned __int128>(next_u64()) * bound;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    constexpr std::uint64_t key() const noexcept { return key_; }

  private:
    std::uint64_t key_;
    std::uint64_t ctr_{0};
};

}  // namespace streamx::rng
