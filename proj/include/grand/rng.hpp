#ifndef GRAND_RNG_HPP
#define GRAND_RNG_HPP

#include <cstdint>

#include "grand/gauss.hpp"

namespace grand::rng {

inline uint64_t mix64(uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Counter-based SplitMix64 stream. Streams derived from (seed, trial) keys are
/// statistically independent of worker scheduling, which keeps parallel Monte
/// Carlo runs bit-reproducible.
class Stream {
public:
    explicit Stream(uint64_t key) : state_(mix64(key ^ 0x53475241ull)) {}

    static Stream for_trial(uint64_t seed, uint64_t point_key, uint64_t trial) {
        return Stream(mix64(seed) ^ mix64(point_key + 0x1000003ull) ^ mix64(trial * 0x2545F4914F6CDD1Dull));
    }

    uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform in the open interval (0,1).
    double next_unit() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    }

    /// Standard normal via inverse CDF; deterministic across platforms.
    double next_gauss() { return gauss::quantile(next_unit()); }

    bool next_bit() { return next_u64() >> 63; }

private:
    uint64_t state_;
};

}  // namespace grand::rng

#endif
