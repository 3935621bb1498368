#pragma once

// Deterministic randomness for the channel simulator.
//
// Everything is driven by SplitMix64, a 64-bit counter-based generator.
// Independent substreams are derived by hashing a role tag into the state,
// so the white-noise stream, the width-jitter stream, etc. never share
// draws: switching one noise term off cannot change what another one sees.
// Gaussians come from Box-Muller, exponential gaps from inverse transform.
// Given the same (seed, parameters), a simulation is bit-reproducible.

#include <cmath>
#include <cstdint>

namespace bm {

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform on (0,1); offset by half an ulp so log() below never sees 0.
    double next_unit() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double next_normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = next_unit();
        const double u2 = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    double next_exponential(double rate) {
        return -std::log(next_unit()) / rate;
    }

    // Independent substream for a named role.
    SplitMix64 split(std::uint64_t role) const {
        SplitMix64 mixer(state_ ^ (role * 0xd6e8feb86659fd93ull + 0x2545f4914f6cdd1dull));
        return SplitMix64(mixer.next_u64());
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace bm
