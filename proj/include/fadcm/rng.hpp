#pragma once

#include <cstdint>
#include <vector>

namespace fadcm {

// SplitMix64 generator. Chosen over std::mt19937 + std distributions because
// the standard distributions are not bit-reproducible across library
// implementations; every draw here is defined arithmetic on uint64.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return next_double() < p; }

    // Uniform integer in [0, n). Rejection sampling, unbiased.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) return 0;
        const std::uint64_t threshold = (0ULL - n) % n;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
};

// Stream tags keep the draw sequences for truth generation, user session
// simulation and policy-internal randomness independent of each other.
enum class Stream : std::uint64_t {
    Truth = 1,
    Session = 2,
    Policy = 3,
};

// Derives a child seed from (master, replication, round, stream) by mixing
// through SplitMix64 steps. Each (replication, round) pair gets its own
// session generator, so replications can run in any order, on any thread,
// and still produce identical draws.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t replication,
                                 std::uint64_t round, Stream stream) {
    Rng mix(master);
    std::uint64_t a = mix.next_u64();
    Rng mix2(a ^ (replication * 0x9e3779b97f4a7c15ULL)
               ^ (round * 0xc2b2ae3d27d4eb4fULL)
               ^ static_cast<std::uint64_t>(stream));
    mix2.next_u64();
    return mix2.next_u64();
}

} // namespace fadcm
