#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "../numerics/kernel_detail.hpp"
#include "drifting/drift.hpp"
#include "drifting/numerics.hpp"
#include "drifting/parallel.hpp"

namespace drifting {

KernelNormalization parse_normalization(std::string_view s) {
    if (s == "dual-axis") return KernelNormalization::DualAxis;
    if (s == "y-axis") return KernelNormalization::YAxis;
    if (s == "expectation") return KernelNormalization::Expectation;
    if (s == "none") return KernelNormalization::None;
    throw std::invalid_argument("unknown normalization mode: " + std::string(s));
}

std::string_view to_string(KernelNormalization n) {
    switch (n) {
        case KernelNormalization::DualAxis: return "dual-axis";
        case KernelNormalization::YAxis: return "y-axis";
        case KernelNormalization::Expectation: return "expectation";
        case KernelNormalization::None: return "none";
    }
    return "?";
}

TemperatureReduction parse_reduction(std::string_view s) {
    if (s == "sum-fields") return TemperatureReduction::SumFields;
    if (s == "sum-losses") return TemperatureReduction::SumLosses;
    throw std::invalid_argument("unknown temperature reduction: " + std::string(s));
}

std::string_view to_string(TemperatureReduction r) {
    return r == TemperatureReduction::SumFields ? "sum-fields" : "sum-losses";
}

void DriftSpec::validate(std::size_t n_x, std::size_t n_neg) const {
    if (temperatures.empty()) throw std::invalid_argument("DriftSpec: temperatures must be nonempty");
    for (double t : temperatures) {
        if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("DriftSpec: temperatures must be > 0");
    }
    if (!std::isfinite(attraction_scale) || !std::isfinite(repulsion_scale)) {
        throw std::invalid_argument("DriftSpec: non-finite attraction/repulsion scale");
    }
    if (!neg_log_weights.empty()) {
        if (neg_log_weights.size() != n_neg) throw std::invalid_argument("DriftSpec: neg_log_weights size mismatch");
        for (double lw : neg_log_weights) {
            if (std::isnan(lw) || lw == std::numeric_limits<double>::infinity()) {
                throw std::invalid_argument("DriftSpec: invalid negative log-weight");
            }
        }
    }
    if (!self_mask.empty()) {
        if (self_mask.size() != n_x) throw std::invalid_argument("DriftSpec: self_mask size mismatch");
        std::vector<unsigned char> seen(n_neg, 0);
        for (auto j : self_mask) {
            if (j == kNoSelfPair) continue;
            if (j < 0 || static_cast<std::size_t>(j) >= n_neg) {
                throw std::invalid_argument("DriftSpec: self_mask index out of range");
            }
            if (seen[j]) throw std::invalid_argument("DriftSpec: self_mask is not injective");
            seen[j] = 1;
        }
    }
}

Matrix kernel_logits(const Matrix& x, const Matrix& y, double tau_eff) {
    if (!(tau_eff > 0.0) || !std::isfinite(tau_eff)) throw std::invalid_argument("kernel_logits: tau must be > 0");
    Matrix d = pairwise_l2(x, y);
    const double inv = -1.0 / tau_eff;
    for (double& v : d.values()) v *= inv;
    return d;
}

namespace {

// Negatives that survive removal of -inf log-weights, with remapped mask.
struct ActiveNegatives {
    Matrix rows;
    std::vector<double> log_w;
    std::vector<std::ptrdiff_t> self_mask;
};

ActiveNegatives active_negatives(const Matrix& y_neg, const DriftSpec& spec) {
    ActiveNegatives out;
    const std::size_t m = y_neg.rows();
    std::vector<std::size_t> keep;
    std::vector<std::ptrdiff_t> remap(m, kNoSelfPair);
    for (std::size_t j = 0; j < m; ++j) {
        const double lw = spec.neg_log_weights.empty() ? 0.0 : spec.neg_log_weights[j];
        if (lw == -std::numeric_limits<double>::infinity()) continue;
        remap[j] = static_cast<std::ptrdiff_t>(keep.size());
        keep.push_back(j);
        out.log_w.push_back(lw);
    }
    if (keep.size() == m) {
        out.rows = y_neg;
    } else {
        out.rows = select_rows(y_neg, keep);
    }
    if (!spec.self_mask.empty()) {
        out.self_mask.resize(spec.self_mask.size(), kNoSelfPair);
        for (std::size_t i = 0; i < spec.self_mask.size(); ++i) {
            if (spec.self_mask[i] != kNoSelfPair) out.self_mask[i] = remap[spec.self_mask[i]];
        }
    }
    return out;
}

}  // namespace

Matrix compute_drift_raw(const Matrix& x, const Matrix& y_pos, const Matrix& y_neg, const DriftSpec& spec,
                         double tau) {
    require_valid(x, "compute_drift_raw(x)");
    if (y_pos.empty()) throw std::invalid_argument("compute_drift_raw: empty positive set");
    if (y_neg.empty()) throw std::invalid_argument("compute_drift_raw: empty negative set");
    require_valid(y_pos, "compute_drift_raw(y_pos)");
    require_valid(y_neg, "compute_drift_raw(y_neg)");
    if (y_pos.cols() != x.cols() || y_neg.cols() != x.cols()) {
        throw std::invalid_argument("compute_drift_raw: dimension mismatch");
    }
    spec.validate(x.rows(), y_neg.rows());
    if (!(tau > 0.0)) throw std::invalid_argument("compute_drift_raw: tau must be > 0");

    const ActiveNegatives neg = active_negatives(y_neg, spec);
    if (neg.rows.empty()) throw std::invalid_argument("compute_drift_raw: every negative has zero weight");

    const std::size_t n = x.rows(), p = y_pos.rows(), m = neg.rows.rows(), d = x.cols();
    const std::size_t cols = p + m;

    // logits over [pos | neg]; self pairs are excluded through the mask
    Matrix logits(n, cols);
    Mask mask(n, cols);
    {
        const Matrix lp = kernel_logits(x, y_pos, tau);
        const Matrix ln = kernel_logits(x, neg.rows, tau);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < p; ++j) logits(i, j) = lp(i, j);
            for (std::size_t j = 0; j < m; ++j) logits(i, p + j) = ln(i, j) + neg.log_w[j];
        }
        for (std::size_t i = 0; i < neg.self_mask.size(); ++i) {
            if (neg.self_mask[i] != kNoSelfPair) mask.set(i, p + static_cast<std::size_t>(neg.self_mask[i]));
        }
        for (std::size_t i = 0; i < n; ++i) {
            bool any = false;
            for (std::size_t j = 0; j < m && !any; ++j) any = !mask(i, p + j);
            if (!any) throw std::invalid_argument("compute_drift_raw: fully masked negative row " + std::to_string(i));
        }
    }

    // Row-wise weights on positives and negatives.
    Matrix w_pos(n, p), w_neg(n, m);
    const auto mode = spec.normalization;
    if (mode == KernelNormalization::DualAxis || mode == KernelNormalization::YAxis) {
        Matrix a = masked_softmax(logits, SoftmaxAxis::OverColumns, &mask);
        if (mode == KernelNormalization::DualAxis) {
            // Column softmax over x; a column masked for every x carries no weight.
            Matrix a_col(n, cols);
            const long long ncols = static_cast<long long>(cols);
#pragma omp parallel for schedule(static) num_threads(thread_count()) if (n * cols > 4096)
            for (long long j = 0; j < ncols; ++j) {
                if (!detail::softmax_slice(logits.values().data() + j, a_col.values().data() + j,
                                           mask.bits.data() + j, n, cols)) {
                    for (std::size_t i = 0; i < n; ++i) a_col(i, static_cast<std::size_t>(j)) = 0.0;
                }
            }
            for (std::size_t k = 0; k < a.size(); ++k) a.values()[k] = std::sqrt(a.values()[k] * a_col.values()[k]);
        }
        for (std::size_t i = 0; i < n; ++i) {
            double s_pos = 0.0, s_neg = 0.0;
            for (std::size_t j = 0; j < p; ++j) s_pos += a(i, j);
            for (std::size_t j = 0; j < m; ++j) s_neg += a(i, p + j);
            for (std::size_t j = 0; j < p; ++j) w_pos(i, j) = a(i, j) * s_neg;
            for (std::size_t j = 0; j < m; ++j) w_neg(i, j) = a(i, p + j) * s_pos;
        }
    } else {
        const long long nn = static_cast<long long>(n);
#pragma omp parallel for schedule(static) num_threads(thread_count()) if (n * cols > 4096)
        for (long long ii = 0; ii < nn; ++ii) {
            const auto i = static_cast<std::size_t>(ii);
            const double* lrow = logits.row(i).data();
            const unsigned char* mrow = mask.bits.data() + i * cols;
            if (mode == KernelNormalization::Expectation) {
                detail::softmax_slice(lrow, w_pos.row(i).data(), nullptr, p, 1);
                detail::softmax_slice(lrow + p, w_neg.row(i).data(), mrow + p, m, 1);
            } else {
                // Z_p = Z_q = 1: empirical means of raw kernel values.
                double kp = 0.0;
                for (std::size_t j = 0; j < p; ++j) {
                    w_pos(i, j) = std::exp(lrow[j]) / static_cast<double>(p);
                    kp += w_pos(i, j);
                }
                double wsum = 0.0, kn = 0.0;
                for (std::size_t j = 0; j < m; ++j) {
                    if (mrow[p + j]) {
                        w_neg(i, j) = 0.0;
                        continue;
                    }
                    wsum += std::exp(neg.log_w[j]);
                    w_neg(i, j) = std::exp(lrow[p + j]);  // includes log-weight
                    kn += w_neg(i, j);
                }
                for (std::size_t j = 0; j < m; ++j) w_neg(i, j) *= kp / wsum;
                kn /= wsum;
                for (std::size_t j = 0; j < p; ++j) w_pos(i, j) *= kn;
            }
        }
    }

    Matrix v(n, d);
    const double a_scale = spec.attraction_scale, r_scale = spec.repulsion_scale;
    const bool symmetric = a_scale == r_scale;
    const long long nn = static_cast<long long>(n);
#pragma omp parallel for schedule(static) num_threads(thread_count()) if (n * cols * d > 4096)
    for (long long ii = 0; ii < nn; ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        double* out = v.row(i).data();
        double s_pos = 0.0, s_neg = 0.0;
        for (std::size_t j = 0; j < p; ++j) s_pos += w_pos(i, j);
        for (std::size_t j = 0; j < m; ++j) s_neg += w_neg(i, j);
        for (std::size_t k = 0; k < d; ++k) {
            double dp = 0.0, dn = 0.0;
            for (std::size_t j = 0; j < p; ++j) dp += w_pos(i, j) * y_pos(j, k);
            for (std::size_t j = 0; j < m; ++j) dn += w_neg(i, j) * neg.rows(j, k);
            if (symmetric) {
                out[k] = a_scale * (dp - dn);
            } else {
                const double xk = x(i, k);
                out[k] = a_scale * (dp - s_pos * xk) - r_scale * (dn - s_neg * xk);
            }
        }
    }
    return v;
}

double cfg_weight(double alpha, std::size_t n_neg, std::size_t n_unc) {
    if (!(alpha >= 1.0) || !std::isfinite(alpha)) throw std::invalid_argument("cfg_weight: alpha must be >= 1");
    if (n_neg < 2) throw std::invalid_argument("cfg_weight: n_neg must be >= 2");
    if (n_unc < 1) throw std::invalid_argument("cfg_weight: n_unc must be >= 1");
    return (alpha - 1.0) * static_cast<double>(n_neg - 1) / static_cast<double>(n_unc);
}

double cfg_alpha(double w, std::size_t n_neg, std::size_t n_unc) {
    if (!(w >= 0.0)) throw std::invalid_argument("cfg_alpha: w must be >= 0");
    if (n_neg < 2) throw std::invalid_argument("cfg_alpha: n_neg must be >= 2");
    const double base = static_cast<double>(n_neg - 1);
    return (base + static_cast<double>(n_unc) * w) / base;
}

}  // namespace drifting
