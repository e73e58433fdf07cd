#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "drifting/matrix.hpp"

namespace drifting {

// Seedable generator with order-independent splitting.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the
// standard. Uniform and normal variates are derived from raw 64-bit draws
// in this file (not via <random> distributions, whose algorithms are
// implementation-defined), so a seed reproduces the same stream on every
// conforming platform. split(key) derives a child from (seed, key) only,
// never from the current stream position.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0);

    std::uint64_t seed() const { return seed_; }
    Rng split(std::uint64_t key) const;

    std::uint64_t next_u64() { return engine_(); }
    // Uniform on [0, 1) with 53 random bits.
    double uniform();
    // Uniform integer on [0, n).
    std::uint64_t below(std::uint64_t n);
    // Standard normal (Marsaglia polar method).
    double normal();

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

std::uint64_t splitmix64(std::uint64_t x);

Matrix draw_normal(Rng& rng, std::size_t n, std::size_t d);

// k indices drawn proportionally to weights; distinct when !replacement.
std::vector<std::size_t> draw_categorical(Rng& rng, std::span<const double> weights, std::size_t k,
                                          bool replacement);

}  // namespace drifting
