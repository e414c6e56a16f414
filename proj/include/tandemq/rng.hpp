// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>

namespace tandemq {

/// splitmix64, used only to expand a user seed into generator state.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

/// xoshiro256++ (Blackman & Vigna, public domain reference). Chosen over
/// std engines because its output is pinned by the algorithm, not the
/// standard library, so seeded runs are reproducible byte for byte.
/// long_jump() advances 2^192 steps, giving disjoint per-replication
/// streams from one seed.
class Xoshiro256pp {
  public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        SplitMix64 sm(seed);
        for (auto& w : s_) w = sm.next();
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    void long_jump() {
        static constexpr std::uint64_t kJump[] = {0x76e15d3efefdcbbfULL, 0xc5004e441c522fb3ULL,
                                                  0x77710069854ee241ULL, 0x39109bb02acbe635ULL};
        std::uint64_t s0 = 0, s1 = 0, s2 = 0, s3 = 0;
        for (std::uint64_t jump : kJump)
            for (int b = 0; b < 64; ++b) {
                if (jump & (1ULL << b)) {
                    s0 ^= s_[0];
                    s1 ^= s_[1];
                    s2 ^= s_[2];
                    s3 ^= s_[3];
                }
                next();
            }
        s_[0] = s0;
        s_[1] = s1;
        s_[2] = s2;
        s_[3] = s3;
    }

    /// Uniform on (0, 1]; never returns 0 so it can feed a logarithm.
    double uniform01() {
        return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
    }

    double exponential(double rate) { return -std::log(uniform01()) / rate; }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t s_[4];
};

/// Stream for one replication: seed-derived base state advanced by
/// `replication` long jumps.
inline Xoshiro256pp replication_stream(std::uint64_t seed, std::uint32_t replication) {
    Xoshiro256pp rng(seed);
    for (std::uint32_t i = 0; i < replication; ++i) rng.long_jump();
    return rng;
}

}  // namespace tandemq
