#pragma once

#include <cstdint>
#include <vector>

namespace ccdim {

// splitmix64 finalizer. Stable across platforms and standard libraries; all
// randomness in the project is derived from it so that equal seeds give
// bit-identical outputs everywhere.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Derives an independent stream seed for (seed, tag, index). Streams are a
// pure function of their coordinates, so generation order and parallel
// scheduling cannot change what a stream produces.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
    std::uint64_t h = mix64(seed ^ mix64(tag));
    return mix64(h ^ mix64(index + 0x632be59bd9b4e019ULL));
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Unbiased sample from [0, n) via rejection; n must be positive.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % n;
        std::uint64_t v = next();
        while (v >= limit)
            v = next();
        return v % n;
    }

    bool coin() { return next() & 1u; }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i)
            std::swap(v[i - 1], v[below(i)]);
    }

    std::vector<std::uint32_t> permutation(std::uint32_t n) {
        std::vector<std::uint32_t> p(n);
        for (std::uint32_t i = 0; i < n; ++i)
            p[i] = i;
        shuffle(p);
        return p;
    }

private:
    std::uint64_t state_;
};

} // namespace ccdim
