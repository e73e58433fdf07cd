#include "drifting/loss.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace drifting {

namespace {

double mean_sq_diff(const Matrix& a, const Matrix& b) {
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a.values()[k] - b.values()[k];
        acc += d * d;
    }
    return acc / static_cast<double>(a.size());
}

double mean_sq(const Matrix& a) {
    double acc = 0.0;
    for (double v : a.values()) acc += v * v;
    return acc / static_cast<double>(a.size());
}

Matrix plus(const Matrix& a, const Matrix& b) {
    Matrix out = a;
    for (std::size_t k = 0; k < out.size(); ++k) out.values()[k] += b.values()[k];
    return out;
}

}  // namespace

LossResult drifting_loss_and_grad(const DriftBatch& batch, const DriftSpec& spec, const FeatureSet& features) {
    const Matrix& x = batch.generated;
    require_valid(x, "drifting_loss(generated)");
    if (batch.positives.empty()) throw std::invalid_argument("drifting_loss: empty positive set");
    if (features.empty()) throw std::invalid_argument("drifting_loss: empty feature set");
    if (!(batch.unc_weight >= 0.0) || !std::isfinite(batch.unc_weight)) {
        throw std::invalid_argument("drifting_loss: unconditional weight must be finite and >= 0");
    }
    const bool self_negatives = batch.negatives == nullptr;
    const Matrix& neg = self_negatives ? x : *batch.negatives;
    const bool use_unc = batch.unconditional && !batch.unconditional->empty() && batch.unc_weight > 0.0;

    DriftSpec group_spec = spec;
    group_spec.self_mask.clear();
    group_spec.neg_log_weights.clear();
    if (self_negatives) {
        group_spec.self_mask.resize(x.rows());
        for (std::size_t i = 0; i < x.rows(); ++i) group_spec.self_mask[i] = static_cast<std::ptrdiff_t>(i);
    }
    if (use_unc) {
        group_spec.neg_log_weights.assign(neg.rows(), 0.0);
        group_spec.neg_log_weights.resize(neg.rows() + batch.unconditional->rows(), std::log(batch.unc_weight));
    }

    LossResult out;
    out.grad_x = Matrix(x.rows(), x.cols());
    for (const auto& phi : features) {
        const Matrix fx = phi->apply(x);
        const Matrix fpos = phi->apply(batch.positives);
        Matrix fneg = self_negatives ? fx : phi->apply(neg);
        if (use_unc) fneg = vstack(fneg, phi->apply(*batch.unconditional));

        FeatureLoss fl;
        fl.drift = aggregate_drift(fx, fpos, fneg, group_spec);
        const double inv_s = 1.0 / fl.drift.feature_scale;
        const Matrix xs = scaled(fx, inv_s);
        const double nc = static_cast<double>(fx.size());

        Matrix cot(fx.rows(), fx.cols());
        auto add_term = [&](const Matrix& field) {
            Matrix target = plus(xs, field);
            fl.loss += mean_sq_diff(xs, target);
            fl.v_norm_sq += mean_sq(field);
            for (std::size_t k = 0; k < cot.size(); ++k) {
                cot.values()[k] += 2.0 * (xs.values()[k] - target.values()[k]) / nc;
            }
            fl.targets.push_back(std::move(target));
        };
        if (spec.reduction == TemperatureReduction::SumFields) {
            add_term(fl.drift.field);
        } else {
            for (const auto& f : fl.drift.per_tau) add_term(f);
        }
        // phi~ = phi / S with S held constant
        for (double& v : cot.values()) v *= inv_s;
        const Matrix gx = phi->pullback(x, cot);
        for (std::size_t k = 0; k < gx.size(); ++k) out.grad_x.values()[k] += gx.values()[k];

        out.loss += fl.loss;
        out.v_norm_sq += fl.v_norm_sq;
        out.per_feature.push_back(std::move(fl));
    }
    return out;
}

double frozen_target_loss(const Matrix& x, const FeatureSet& features, const LossResult& frozen) {
    if (frozen.per_feature.size() != features.size()) {
        throw std::invalid_argument("frozen_target_loss: feature count mismatch");
    }
    double loss = 0.0;
    for (std::size_t j = 0; j < features.size(); ++j) {
        const auto& fl = frozen.per_feature[j];
        const Matrix xs = scaled(features[j]->apply(x), 1.0 / fl.drift.feature_scale);
        for (const auto& t : fl.targets) loss += mean_sq_diff(xs, t);
    }
    return loss;
}

}  // namespace drifting
