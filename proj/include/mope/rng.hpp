#pragma once

#include <cstdint>
#include <random>

namespace mope {

// splitmix64; used to derive independent sub-streams from a master seed.
inline uint64_t mix_seed(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t mix_seed(uint64_t a, uint64_t b) { return mix_seed(a ^ mix_seed(b)); }
inline uint64_t mix_seed(uint64_t a, uint64_t b, uint64_t c) { return mix_seed(mix_seed(a, b) ^ mix_seed(c)); }

// Thin wrapper around mt19937_64 with draw helpers that do not depend on
// libstdc++'s distribution implementations, so identical seeds give identical
// streams on any platform.
class Rng {
  public:
    explicit Rng(uint64_t seed = 0) : eng_(mix_seed(seed)) {}

    uint64_t next_u64() { return eng_(); }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    // uniform integer in [0, n)
    int uniform_int(int n) {
        int v = static_cast<int>(uniform() * static_cast<double>(n));
        return v < n ? v : n - 1;
    }

  private:
    std::mt19937_64 eng_;
};

}  // namespace mope
