#pragma once

#include <cstdint>

namespace weakmeas {

// Splittable deterministic PRNG built on the splitmix64 finalizer. The output
// stream depends only on the seed (not on platform or library version), and
// derive(i) yields a stream decorrelated from both the parent and other
// indices, which is what makes per-trial reproducibility independent of how
// trials are distributed across workers.
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    // Uniform on [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Stream for (current state, index); does not advance this source.
    RandomSource derive(std::uint64_t index) const {
        return RandomSource(mix(state_ ^ mix(index + 0x632be59bd9b4e019ULL)));
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t state_;
};

}  // namespace weakmeas
