#pragma once

#include <cstdint>

namespace diophlab {

// Threefry-2x64 counter-based generator (20 rounds).  Every draw is a pure
// function of (key, counter), so sampling is reproducible bit-for-bit across
// platforms and for any work-splitting across threads.
struct Threefry2x64 {
    static constexpr std::uint64_t parity = 0x1BD11BDAA9FC1A22ULL;
    static constexpr int rotations[8] = {16, 42, 12, 31, 16, 32, 24, 21};

    static inline std::uint64_t rotl(std::uint64_t x, int r) {
        return (x << r) | (x >> (64 - r));
    }

    // One 128-bit block keyed by (k0,k1) at counter (c0,c1); returns low word.
    static std::uint64_t block(std::uint64_t k0, std::uint64_t k1,
                               std::uint64_t c0, std::uint64_t c1) {
        std::uint64_t ks[3] = {k0, k1, parity ^ k0 ^ k1};
        std::uint64_t x0 = c0 + ks[0], x1 = c1 + ks[1];
        for (int round = 0; round < 20; ++round) {
            x0 += x1;
            x1 = rotl(x1, rotations[round % 8]) ^ x0;
            if ((round + 1) % 4 == 0) {
                int s = (round + 1) / 4;
                x0 += ks[s % 3];
                x1 += ks[(s + 1) % 3] + static_cast<std::uint64_t>(s);
            }
        }
        return x0;
    }
};

// uniform in [0,1) from the top 53 bits
inline double u01_from_bits(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Stateless uniform draw: stream separates independent uses of one seed.
inline double uniform01(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    return u01_from_bits(Threefry2x64::block(seed, stream, index, 0));
}

// Small stateful convenience wrapper for sequential draws.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

    double next_u01() { return uniform01(seed_, stream_, index_++); }

    double next_in(double lo, double hi) { return lo + (hi - lo) * next_u01(); }

    // integer in [lo, hi] inclusive
    long long next_int(long long lo, long long hi) {
        return lo + static_cast<long long>(next_u01() * static_cast<double>(hi - lo + 1));
    }

  private:
    std::uint64_t seed_, stream_;
    std::uint64_t index_ = 0;
};

}  // namespace diophlab
