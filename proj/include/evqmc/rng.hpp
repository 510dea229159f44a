// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

namespace evqmc {

// SplitMix64 (Steele/Lea/Flood), used as a splittable counter-based stream:
// stream(seed, r) yields an independent generator for shift/sample index r,
// so parallel workers never share state and reruns are bitwise reproducible.
class SplitMix64 {
public:
    static constexpr std::uint64_t golden = 0x9e3779b97f4a7c15ULL;

    static SplitMix64 stream(std::uint64_t seed, std::uint64_t stream_id) {
        SplitMix64 g;
        g.state_ = mix(seed + golden * (stream_id + 1));
        return g;
    }

    std::uint64_t next() {
        state_ += golden;
        return mix(state_);
    }

    // uniform on [0,1) with 53 random bits
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // uniform on [-1/2, 1/2)
    double next_symmetric() { return next_unit() - 0.5; }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_ = 0;
};

} // namespace evqmc
