#pragma once

#include <cstdint>

namespace ising {

// Counter-based generator built on the splitmix64 finalizer.  A stream is
// identified by its seed; split(k) derives an independent child stream, so
// per-replicate seeds do not depend on execution order.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), counter_(0) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() {
        counter_ += 0x9e3779b97f4a7c15ULL;
        return mix(seed_ ^ mix(counter_));
    }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // unbiased integer in [0, n), n >= 1
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t threshold = -n % n;  // 2^64 mod n
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    bool coin() { return (next_u64() >> 63) != 0; }

    Rng split(std::uint64_t stream) const {
        return Rng(mix(seed_ + 0x632be59bd9b4e019ULL * (stream + 1)));
    }

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

private:
    std::uint64_t seed_;
    std::uint64_t counter_;
};

}  // namespace ising
