#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <vector>

#include "drifting/matrix.hpp"
#include "drifting/rng.hpp"

namespace testing {

// Uniform entries on [-scale, scale).
inline drifting::Matrix random_matrix(drifting::Rng& rng, std::size_t n, std::size_t d, double scale = 1.0) {
    drifting::Matrix m(n, d);
    for (double& v : m.values()) v = scale * (2.0 * rng.uniform() - 1.0);
    return m;
}

// Integer uniformly on [lo, hi].
inline std::size_t random_size(drifting::Rng& rng, std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(rng.below(hi - lo + 1));
}

inline double random_real(drifting::Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

inline drifting::Matrix shifted(const drifting::Matrix& m, const std::vector<double>& c) {
    drifting::Matrix out = m;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t k = 0; k < m.cols(); ++k) out(i, k) += c[k];
    }
    return out;
}

inline bool bytes_equal(const drifting::Matrix& a, const drifting::Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (std::memcmp(&a.values()[k], &b.values()[k], sizeof(double)) != 0) return false;
    }
    return true;
}

}  // namespace testing
