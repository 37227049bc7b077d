#ifndef HIVENAV_PRNG_HPP
#define HIVENAV_PRNG_HPP

#include <cstdint>

namespace hivenav {

// SplitMix64 (Steele, Lea & Flood 2014). Chosen over std::mt19937 because the
// output sequence is fully specified by the algorithm, so worlds regenerate
// bit-identically across standard libraries and platforms.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Unbiased-enough for world generation; bound is always small here.
    std::uint64_t next_below(std::uint64_t bound) {
        return bound == 0 ? 0 : next() % bound;
    }

    double next_unit() {
        return static_cast<double>(next() >> 11) * (1.0 / 9007199254740992.0);
    }

private:
    std::uint64_t state_;
};

}  // namespace hivenav

#endif
