#pragma once

#include <complex>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace ralp {

// splitmix64 finalizer step.  Used both as a stream deriver and to whiten
// user-supplied seeds before they reach the main engine.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Derives an independent child seed from (base, stream).  Two splitmix64
// rounds after mixing the stream index in; collisions across distinct
// (base, stream) pairs are negligible for our purposes.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t s = base ^ (0x632BE59BD9B4E019ULL * (stream + 1));
    std::uint64_t a = splitmix64(s);
    s ^= a;
    return splitmix64(s);
}

// Deterministic random source.  Every distribution below is built from raw
// mt19937_64 words with fixed arithmetic, so a given seed produces an
// identical draw sequence on any conforming platform.  In particular we do
// not use std::normal_distribution or std::uniform_int_distribution, whose
// algorithms are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform double in [0, 1), 53 random bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Circularly-symmetric complex Gaussian with E|z|^2 = 1 (variance 1/2
    // per real component), via the polar Box-Muller transform.
    std::complex<double> complex_normal() {
        const double u1 = 1.0 - uniform();  // in (0, 1]; keeps log finite
        const double r = std::sqrt(-std::log(u1));
        const double phase = 2.0 * std::numbers::pi * uniform();
        return {r * std::cos(phase), r * std::sin(phase)};
    }

    // Uniform integer in [0, bound) without modulo bias.
    int uniform_int(int bound) {
        if (bound <= 0) throw std::invalid_argument("Rng::uniform_int: bound must be positive");
        const auto b = static_cast<std::uint64_t>(bound);
        const std::uint64_t reject_below = (-b) % b;  // 2^64 mod bound
        for (;;) {
            const std::uint64_t x = engine_();
            if (x >= reject_below) return static_cast<int>(x % b);
        }
    }

    // `count` distinct integers drawn uniformly from [0, population), in
    // draw order (partial Fisher-Yates).
    std::vector<int> sample_distinct(int count, int population) {
        if (count < 0 || count > population)
            throw std::invalid_argument("Rng::sample_distinct: need 0 <= count <= population");
        std::vector<int> idx(static_cast<std::size_t>(population));
        for (int i = 0; i < population; ++i) idx[static_cast<std::size_t>(i)] = i;
        for (int i = 0; i < count; ++i) {
            const int j = i + uniform_int(population - i);
            std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
        }
        idx.resize(static_cast<std::size_t>(count));
        return idx;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace ralp
