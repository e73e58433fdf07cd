#pragma once

#include <vector>

#include "drifting/drift.hpp"
#include "drifting/features.hpp"
#include "drifting/matrix.hpp"

namespace drifting {

// One per-class group of the drifting loss.
struct DriftBatch {
    const Matrix& generated;
    const Matrix& positives;
    // nullptr: the generated rows are their own negatives (self-masked).
    const Matrix* negatives = nullptr;
    // Real samples from the unconditional pool, weighted by unc_weight.
    const Matrix* unconditional = nullptr;
    double unc_weight = 0.0;
};

struct FeatureLoss {
    double loss = 0.0;
    double v_norm_sq = 0.0;  // mean over rows and components of the field, squared
    DriftResult drift;
    // Frozen regression targets phi(x)/S + V, one per loss term (a single
    // entry for SumFields, one per temperature for SumLosses).
    std::vector<Matrix> targets;
};

struct LossResult {
    double loss = 0.0;
    double v_norm_sq = 0.0;
    Matrix grad_x;
    std::vector<FeatureLoss> per_feature;
};

// Sum over feature maps of MSE(phi~(x) - stopgrad(phi~(x) + V~)), with its
// gradient with respect to the generated samples. The targets are frozen:
// no derivative flows through V~ or through the normalization scales.
LossResult drifting_loss_and_grad(const DriftBatch& batch, const DriftSpec& spec, const FeatureSet& features);

// Loss value at x with the targets of `frozen` held fixed.
double frozen_target_loss(const Matrix& x, const FeatureSet& features, const LossResult& frozen);

}  // namespace drifting
