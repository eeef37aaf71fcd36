#pragma once

#include <cstdint>

namespace edl {

// splitmix64: small deterministic generator used everywhere randomness is
// needed. Chosen over std::mt19937 + distributions because the standard
// distributions are implementation-defined; this sequence is reproducible
// bit-for-bit on any platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0,1)
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform integer in [0, n), n > 0
    std::uint64_t next_below(std::uint64_t n) {
        // modulo bias is irrelevant at the sizes used here
        return next_u64() % n;
    }

private:
    std::uint64_t state_;
};

} // namespace edl
