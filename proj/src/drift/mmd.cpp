#include <cmath>
#include <stdexcept>

#include "drifting/drift.hpp"

namespace drifting {

namespace {

// Accumulates mean_j 2 xi'(||x - y_j||^2) (x - y_j) into out, where
// xi'(R) = -exp(-R / (2 sigma^2)) / (2 sigma^2).
void add_kernel_gradient(const Matrix& x, std::size_t i, const Matrix& y, double sigma, double sign, double* out) {
    const double inv_2s2 = 1.0 / (2.0 * sigma * sigma);
    const std::size_t d = x.cols();
    const double inv_n = 1.0 / static_cast<double>(y.rows());
    for (std::size_t j = 0; j < y.rows(); ++j) {
        double r = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            const double diff = x(i, k) - y(j, k);
            r += diff * diff;
        }
        const double xi_prime = -inv_2s2 * std::exp(-r * inv_2s2);
        const double coef = sign * 2.0 * xi_prime * inv_n;
        for (std::size_t k = 0; k < d; ++k) out[k] += coef * (x(i, k) - y(j, k));
    }
}

}  // namespace

Matrix mmd_drift(const Matrix& x, const Matrix& y_pos, const Matrix& y_neg, double sigma) {
    require_valid(x, "mmd_drift(x)");
    require_valid(y_pos, "mmd_drift(y_pos)");
    require_valid(y_neg, "mmd_drift(y_neg)");
    if (y_pos.cols() != x.cols() || y_neg.cols() != x.cols()) throw std::invalid_argument("mmd_drift: dimension mismatch");
    if (!(sigma > 0.0)) throw std::invalid_argument("mmd_drift: sigma must be > 0");
    Matrix v(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        add_kernel_gradient(x, i, y_pos, sigma, +1.0, v.row(i).data());
        add_kernel_gradient(x, i, y_neg, sigma, -1.0, v.row(i).data());
    }
    return v;
}

}  // namespace drifting
