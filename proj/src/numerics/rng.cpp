#include "drifting/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace drifting {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

Rng Rng::split(std::uint64_t key) const {
    return Rng(splitmix64(seed_ ^ splitmix64(key + 0x632be59bd9b4e019ULL)));
}

double Rng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
    // Rejection sampling keeps the result exactly uniform.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t r;
    do {
        r = engine_();
    } while (r >= limit);
    return r % n;
}

double Rng::normal() {
    if (spare_) {
        const double v = *spare_;
        spare_.reset();
        return v;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    return u * f;
}

Matrix draw_normal(Rng& rng, std::size_t n, std::size_t d) {
    if (n == 0 || d == 0) throw std::invalid_argument("draw_normal: n and d must be positive");
    Matrix m(n, d);
    for (double& x : m.values()) x = rng.normal();
    return m;
}

std::vector<std::size_t> draw_categorical(Rng& rng, std::span<const double> weights, std::size_t k,
                                          bool replacement) {
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw std::invalid_argument("draw_categorical: weights must be finite and nonnegative");
        }
    }
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(total > 0.0)) throw std::invalid_argument("draw_categorical: weights sum to zero");

    std::vector<std::size_t> out;
    out.reserve(k);
    if (replacement) {
        std::vector<double> cdf(weights.size());
        std::partial_sum(weights.begin(), weights.end(), cdf.begin());
        for (std::size_t t = 0; t < k; ++t) {
            const double u = rng.uniform() * cdf.back();
            auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
            std::size_t idx = static_cast<std::size_t>(it - cdf.begin());
            // Never land on a zero-weight tail entry through rounding.
            while (idx >= weights.size() || weights[idx] == 0.0) idx = idx == 0 ? 0 : idx - 1;
            out.push_back(idx);
        }
        return out;
    }

    const auto positive = static_cast<std::size_t>(
        std::count_if(weights.begin(), weights.end(), [](double w) { return w > 0.0; }));
    if (k > positive) {
        throw std::invalid_argument("draw_categorical: k exceeds number of positive weights");
    }
    std::vector<double> w(weights.begin(), weights.end());
    for (std::size_t t = 0; t < k; ++t) {
        const double sum = std::accumulate(w.begin(), w.end(), 0.0);
        double u = rng.uniform() * sum;
        std::size_t idx = 0;
        for (; idx < w.size(); ++idx) {
            if (w[idx] == 0.0) continue;
            if (u < w[idx]) break;
            u -= w[idx];
        }
        if (idx == w.size()) {
            // rounding ran past the end: take the last positive entry
            idx = w.size() - 1;
            while (w[idx] == 0.0) --idx;
        }
        out.push_back(idx);
        w[idx] = 0.0;
    }
    return out;
}

}  // namespace drifting
