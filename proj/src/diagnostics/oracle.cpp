#include <cmath>
#include <limits>
#include <stdexcept>

#include "drifting/diagnostics.hpp"

namespace drifting {

namespace {

double distance(const Matrix& a, std::size_t i, const Matrix& b, std::size_t j) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.cols(); ++k) s += (a(i, k) - b(j, k)) * (a(i, k) - b(j, k));
    return std::sqrt(s);
}

}  // namespace

Matrix oracle_drift(const Matrix& x, const Matrix& y_pos, const Matrix& y_neg, const DriftSpec& spec, double tau) {
    require_valid(x, "oracle_drift(x)");
    require_valid(y_pos, "oracle_drift(y_pos)");
    require_valid(y_neg, "oracle_drift(y_neg)");
    if (y_pos.cols() != x.cols() || y_neg.cols() != x.cols()) throw std::invalid_argument("oracle_drift: dimension mismatch");
    if (x.rows() * y_pos.rows() * y_neg.rows() > kOracleMaxWork) throw std::invalid_argument("oracle_drift: instance too large");
    if (!(tau > 0.0)) throw std::invalid_argument("oracle_drift: tau must be > 0");
    spec.validate(x.rows(), y_neg.rows());

    const std::size_t n = x.rows(), p = y_pos.rows(), m = y_neg.rows(), d = x.cols();
    const double ninf = -std::numeric_limits<double>::infinity();

    auto log_w = [&](std::size_t j) { return spec.neg_log_weights.empty() ? 0.0 : spec.neg_log_weights[j]; };
    auto excluded = [&](std::size_t i, std::size_t j) {
        if (log_w(j) == ninf) return true;
        return !spec.self_mask.empty() && spec.self_mask[i] == static_cast<std::ptrdiff_t>(j);
    };

    // Logits; excluded negatives hold -inf.
    std::vector<std::vector<double>> lp(n, std::vector<double>(p)), ln(n, std::vector<double>(m));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p; ++j) lp[i][j] = -distance(x, i, y_pos, j) / tau;
        bool any = false;
        for (std::size_t j = 0; j < m; ++j) {
            ln[i][j] = excluded(i, j) ? ninf : -distance(x, i, y_neg, j) / tau + log_w(j);
            any = any || ln[i][j] != ninf;
        }
        if (!any) throw std::invalid_argument("oracle_drift: fully masked negative row");
    }

    // Pair weights c(i, j, k) multiplying (y+_j - y-_k); built per mode.
    std::vector<std::vector<double>> a_pos(n, std::vector<double>(p)), a_neg(n, std::vector<double>(m));
    const auto mode = spec.normalization;
    if (mode == KernelNormalization::DualAxis || mode == KernelNormalization::YAxis) {
        for (std::size_t i = 0; i < n; ++i) {
            double mx = ninf;
            for (std::size_t j = 0; j < p; ++j) mx = std::max(mx, lp[i][j]);
            for (std::size_t j = 0; j < m; ++j) mx = std::max(mx, ln[i][j]);
            double z = 0.0;
            for (std::size_t j = 0; j < p; ++j) z += std::exp(lp[i][j] - mx);
            for (std::size_t j = 0; j < m; ++j) z += ln[i][j] == ninf ? 0.0 : std::exp(ln[i][j] - mx);
            for (std::size_t j = 0; j < p; ++j) a_pos[i][j] = std::exp(lp[i][j] - mx) / z;
            for (std::size_t j = 0; j < m; ++j) a_neg[i][j] = ln[i][j] == ninf ? 0.0 : std::exp(ln[i][j] - mx) / z;
        }
        if (mode == KernelNormalization::DualAxis) {
            for (std::size_t j = 0; j < p; ++j) {
                double mx = ninf, z = 0.0;
                for (std::size_t i = 0; i < n; ++i) mx = std::max(mx, lp[i][j]);
                for (std::size_t i = 0; i < n; ++i) z += std::exp(lp[i][j] - mx);
                for (std::size_t i = 0; i < n; ++i) a_pos[i][j] = std::sqrt(a_pos[i][j] * std::exp(lp[i][j] - mx) / z);
            }
            for (std::size_t j = 0; j < m; ++j) {
                double mx = ninf, z = 0.0;
                for (std::size_t i = 0; i < n; ++i) mx = std::max(mx, ln[i][j]);
                if (mx == ninf) {
                    for (std::size_t i = 0; i < n; ++i) a_neg[i][j] = 0.0;
                    continue;
                }
                for (std::size_t i = 0; i < n; ++i) z += ln[i][j] == ninf ? 0.0 : std::exp(ln[i][j] - mx);
                for (std::size_t i = 0; i < n; ++i) {
                    const double col = ln[i][j] == ninf ? 0.0 : std::exp(ln[i][j] - mx) / z;
                    a_neg[i][j] = std::sqrt(a_neg[i][j] * col);
                }
            }
        }
    }

    Matrix v(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        double scale = 1.0;
        std::vector<double> kp(p), kn(m);
        if (mode == KernelNormalization::DualAxis || mode == KernelNormalization::YAxis) {
            kp = a_pos[i];
            kn = a_neg[i];
        } else if (mode == KernelNormalization::Expectation) {
            // k_j k_k w_k / (sum_j k_j * sum_k w_k k_k); a common shift cancels
            double mx = ninf;
            for (std::size_t j = 0; j < p; ++j) mx = std::max(mx, lp[i][j]);
            for (std::size_t j = 0; j < m; ++j) mx = std::max(mx, ln[i][j]);
            double zp = 0.0, zq = 0.0;
            for (std::size_t j = 0; j < p; ++j) zp += kp[j] = std::exp(lp[i][j] - mx);
            for (std::size_t j = 0; j < m; ++j) zq += kn[j] = ln[i][j] == ninf ? 0.0 : std::exp(ln[i][j] - mx);
            scale = 1.0 / (zp * zq);
        } else {
            // Z_p = Z_q = 1: plain empirical means over the pair
            double wsum = 0.0;
            for (std::size_t j = 0; j < p; ++j) kp[j] = std::exp(lp[i][j]);
            for (std::size_t j = 0; j < m; ++j) {
                if (ln[i][j] == ninf) {
                    kn[j] = 0.0;
                    continue;
                }
                kn[j] = std::exp(ln[i][j]);
                wsum += std::exp(log_w(j));
            }
            scale = 1.0 / (static_cast<double>(p) * wsum);
        }
        for (std::size_t c = 0; c < d; ++c) {
            double v_pos = 0.0, v_neg = 0.0;
            for (std::size_t j = 0; j < p; ++j) {
                for (std::size_t k = 0; k < m; ++k) {
                    const double w = kp[j] * kn[k] * scale;
                    v_pos += w * (y_pos(j, c) - x(i, c));
                    v_neg += w * (y_neg(k, c) - x(i, c));
                }
            }
            v(i, c) = spec.attraction_scale * v_pos - spec.repulsion_scale * v_neg;
        }
    }
    return v;
}

}  // namespace drifting
