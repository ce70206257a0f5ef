#pragma once

#include <cstdint>
#include <random>

namespace tergm {

// Seedable generator used everywhere randomness is needed. Substreams are
// derived from (seed, stream) by splitmix64 so concurrent consumers
// (bootstrap replicates, Gibbs chains) draw from well-separated streams and
// results do not depend on scheduling.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(mix(seed)) {}

    static Rng substream(std::uint64_t seed, std::uint64_t stream) {
        return Rng(mix(seed) ^ mix(stream * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL));
    }

    // uniform in [0, 1) built from the top 53 bits; identical on every
    // platform, unlike std::uniform_real_distribution.
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    // uniform integer in [0, n); plain modulo, bias is irrelevant at the
    // ranges used here and the scheme must stay fixed for reproducibility.
    std::uint64_t uniform_int(std::uint64_t n) { return gen_() % n; }

    int uniform_index(int n) { return static_cast<int>(uniform_int(static_cast<std::uint64_t>(n))); }

    std::uint64_t raw() { return gen_(); }

private:
    static std::uint64_t mix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::mt19937_64 gen_;
};

}  // namespace tergm
