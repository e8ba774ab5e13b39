#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "ontolab/numeric.hpp"

namespace ontolab {

// splitmix64; used to derive independent per-task seeds from one base seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Seed of task `index` under base `seed`. Results of seeded operations
// depend only on (seed, index), never on scheduling or call order.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(seed ^ splitmix64(index + 0x9E3779B97F4A7C15ULL));
}

// mt19937_64 with bit-level reproducible uniform/exponential draws.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // uniform on (0, 1]; 53-bit resolution
    double uniform01() {
        return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
    }

    double exponential() { return -std::log(uniform01()); }

    std::uint64_t bits() { return engine_(); }

    std::size_t below(std::size_t n) {
        // modulo bias is irrelevant at the alphabet sizes used here
        return static_cast<std::size_t>(engine_() % n);
    }

private:
    std::mt19937_64 engine_;
};

// One draw from the flat (Dirichlet(1,...,1)) density on the k-simplex.
// The underlying double draws are identical for both backends, so an exact
// sample is the exactly-normalized rationalization of the float draws.
template <class Num>
std::vector<Num> sample_simplex(Rng& rng, std::size_t k) {
    std::vector<double> e(k);
    double total = 0.0;
    do {
        total = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            e[i] = rng.exponential();
            total += e[i];
        }
    } while (!(total > 0.0));

    std::vector<Num> out(k);
    if constexpr (numeric_traits<Num>::is_exact) {
        Num sum(0);
        for (std::size_t i = 0; i < k; ++i) {
            out[i] = numeric_traits<Num>::from_double(e[i]);
            sum += out[i];
        }
        for (auto& v : out) v /= sum;
    } else {
        for (std::size_t i = 0; i < k; ++i) out[i] = e[i] / total;
    }
    return out;
}

} // namespace ontolab
