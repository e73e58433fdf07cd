#include <cmath>
#include <stdexcept>

#include "drifting/drift.hpp"
#include "drifting/numerics.hpp"

namespace drifting {

double feature_distance_scale(const Matrix& dist_pos, const Matrix& dist_neg, const std::vector<double>& neg_weights,
                              const Mask* neg_mask, std::size_t feature_dim) {
    if (feature_dim == 0) throw std::invalid_argument("feature_distance_scale: feature dimension must be positive");
    if (dist_pos.empty() && dist_neg.empty()) throw std::invalid_argument("feature_distance_scale: no distances");
    if (!neg_weights.empty() && neg_weights.size() != dist_neg.cols()) {
        throw std::invalid_argument("feature_distance_scale: weight count mismatch");
    }
    if (neg_mask && (neg_mask->rows != dist_neg.rows() || neg_mask->cols != dist_neg.cols())) {
        throw std::invalid_argument("feature_distance_scale: mask shape mismatch");
    }
    double num = 0.0, den = 0.0;
    for (double v : dist_pos.values()) {
        if (!(v >= 0.0)) throw std::invalid_argument("feature_distance_scale: negative distance");
        num += v;
        den += 1.0;
    }
    for (std::size_t i = 0; i < dist_neg.rows(); ++i) {
        for (std::size_t j = 0; j < dist_neg.cols(); ++j) {
            if (neg_mask && (*neg_mask)(i, j)) continue;
            const double v = dist_neg(i, j);
            if (!(v >= 0.0)) throw std::invalid_argument("feature_distance_scale: negative distance");
            const double w = neg_weights.empty() ? 1.0 : neg_weights[j];
            num += w * v;
            den += w;
        }
    }
    if (!(den > 0.0) || !(num > 0.0)) {
        throw std::domain_error("feature_distance_scale: all distances are zero (feature collapse)");
    }
    return (num / den) / std::sqrt(static_cast<double>(feature_dim));
}

NormalizedDrift drift_normalize(const Matrix& v, std::size_t feature_dim) {
    require_valid(v, "drift_normalize");
    if (feature_dim == 0) throw std::invalid_argument("drift_normalize: feature dimension must be positive");
    double acc = 0.0;
    for (double x : v.values()) acc += x * x;
    const double mean_sq = acc / static_cast<double>(v.rows()) / static_cast<double>(feature_dim);
    const double lambda = std::max(std::sqrt(mean_sq), kLambdaFloor);
    return {scaled(v, 1.0 / lambda), lambda};
}

DriftResult aggregate_drift(const Matrix& x_feat, const Matrix& pos_feat, const Matrix& neg_feat,
                            const DriftSpec& spec) {
    require_valid(x_feat, "aggregate_drift(x)");
    if (pos_feat.empty() || neg_feat.empty()) throw std::invalid_argument("aggregate_drift: empty sample set");
    spec.validate(x_feat.rows(), neg_feat.rows());
    const std::size_t c = x_feat.cols();

    std::vector<double> neg_w;
    if (!spec.neg_log_weights.empty()) {
        neg_w.reserve(spec.neg_log_weights.size());
        for (double lw : spec.neg_log_weights) neg_w.push_back(std::exp(lw));
    }
    Mask self(x_feat.rows(), neg_feat.rows());
    for (std::size_t i = 0; i < spec.self_mask.size(); ++i) {
        if (spec.self_mask[i] != kNoSelfPair) self.set(i, static_cast<std::size_t>(spec.self_mask[i]));
    }

    DriftResult out;
    out.feature_scale = feature_distance_scale(pairwise_l2(x_feat, pos_feat), pairwise_l2(x_feat, neg_feat), neg_w,
                                               &self, c);
    const double inv_s = 1.0 / out.feature_scale;
    const Matrix xs = scaled(x_feat, inv_s), ps = scaled(pos_feat, inv_s), ns = scaled(neg_feat, inv_s);
    const double sqrt_c = std::sqrt(static_cast<double>(c));

    for (double tau : spec.temperatures) {
        const Matrix raw = compute_drift_raw(xs, ps, ns, spec, tau * sqrt_c);
        NormalizedDrift nd = spec.normalize_drift ? drift_normalize(raw, c) : NormalizedDrift{raw, 1.0};
        if (out.field.empty()) {
            out.field = nd.field;
        } else {
            for (std::size_t k = 0; k < out.field.size(); ++k) out.field.values()[k] += nd.field.values()[k];
        }
        out.lambdas.push_back(nd.lambda);
        out.per_tau.push_back(std::move(nd.field));
    }
    return out;
}

}  // namespace drifting
