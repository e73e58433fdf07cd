#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>

#include "drifting/matrix.hpp"
#include "drifting/numerics.hpp"

// Per-element bodies shared by the serial and OpenMP kernels so both
// produce identical bits.
namespace drifting::detail {

inline double l2_row(const double* a, const double* b, std::size_t d) {
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
        const double diff = a[k] - b[k];
        s += diff * diff;
    }
    return std::sqrt(s);
}

inline void check_pairwise(const Matrix& a, const Matrix& b) {
    require_valid(a, "pairwise_l2(a)");
    require_valid(b, "pairwise_l2(b)");
    if (a.cols() != b.cols()) throw std::invalid_argument("pairwise_l2: dimension mismatch");
}

inline void check_softmax(const Matrix& logits, const Mask* mask) {
    require_valid(logits, "masked_softmax");
    if (mask && (mask->rows != logits.rows() || mask->cols != logits.cols())) {
        throw std::invalid_argument("masked_softmax: mask shape mismatch");
    }
}

// Softmax over one strided slice of `in`, written to the same positions of
// `out`. Returns false when every entry of the slice is masked.
inline bool softmax_slice(const double* in, double* out, const unsigned char* mask, std::size_t n,
                          std::size_t stride) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
        if (mask && mask[k * stride]) continue;
        mx = std::max(mx, in[k * stride]);
    }
    if (mx == -std::numeric_limits<double>::infinity()) return false;
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double e = 0.0;
        if (!(mask && mask[k * stride])) e = std::exp(in[k * stride] - mx);
        out[k * stride] = e;
        sum += e;
    }
    const double inv = 1.0 / sum;
    for (std::size_t k = 0; k < n; ++k) out[k * stride] *= inv;
    return true;
}

}  // namespace drifting::detail
