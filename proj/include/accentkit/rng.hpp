#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string_view>
#include <vector>

namespace accentkit {

// Deterministic 64-bit generator (splitmix64). The standard <random>
// distributions are implementation-defined, so every seeded draw in the
// library goes through this class to keep outputs identical across
// platforms and standard libraries.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Unbiased draw in [0, bound). bound must be > 0.
    uint64_t below(uint64_t bound) {
        const uint64_t threshold = (~bound + 1) % bound;  // 2^64 mod bound
        for (;;) {
            uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

    double unit() {  // [0, 1)
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // k distinct indices from [0, n), via partial Fisher-Yates, returned in
    // ascending order.
    std::vector<size_t> sample_indices(size_t n, size_t k) {
        std::vector<size_t> pool(n);
        std::iota(pool.begin(), pool.end(), size_t{0});
        for (size_t i = 0; i < k; ++i) {
            size_t j = i + static_cast<size_t>(below(n - i));
            std::swap(pool[i], pool[j]);
        }
        pool.resize(k);
        std::sort(pool.begin(), pool.end());
        return pool;
    }

private:
    uint64_t state_;
};

// Stable seed derivation: FNV-1a over the mixed values, finalized with a
// splitmix scramble. Used wherever a job/utterance seed is derived from a
// master seed plus dimension values, so plans are reproducible without
// global state.
class SeedMixer {
public:
    SeedMixer& mix(uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h_ ^= (v >> (8 * i)) & 0xffULL;
            h_ *= 0x100000001b3ULL;
        }
        return *this;
    }

    SeedMixer& mix(std::string_view s) {
        for (unsigned char c : s) {
            h_ ^= c;
            h_ *= 0x100000001b3ULL;
        }
        h_ ^= 0xff;
        h_ *= 0x100000001b3ULL;  // terminator so "ab","c" != "a","bc"
        return *this;
    }

    uint64_t value() const {
        uint64_t z = h_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    uint64_t h_ = 0xcbf29ce484222325ULL;
};

}  // namespace accentkit
