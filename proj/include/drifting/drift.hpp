#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "drifting/matrix.hpp"

namespace drifting {

// How kernel weights are normalized before forming V = V+ - V-.
enum class KernelNormalization {
    DualAxis,     // softmax over y and over x, combined as sqrt(A_row * A_col)
    YAxis,        // softmax over the concatenated [pos | neg] columns only
    Expectation,  // separate Z_p and Z_q normalizers (mean-shift form)
    None,         // unnormalized kernels, Z_p = Z_q = 1
};

// Where the sum over temperatures happens.
enum class TemperatureReduction {
    SumFields,  // one loss on the summed normalized field
    SumLosses,  // one loss per temperature, losses summed
};

KernelNormalization parse_normalization(std::string_view s);
std::string_view to_string(KernelNormalization n);
TemperatureReduction parse_reduction(std::string_view s);
std::string_view to_string(TemperatureReduction r);

inline constexpr std::ptrdiff_t kNoSelfPair = -1;

struct DriftSpec {
    std::vector<double> temperatures{0.02, 0.05, 0.2};
    KernelNormalization normalization = KernelNormalization::DualAxis;
    // Empty disables self-masking. Otherwise self_mask[i] is the negative row
    // that is the same sample as generated row i (or kNoSelfPair).
    std::vector<std::ptrdiff_t> self_mask;
    // Per-negative log-weight; empty means all zero. -inf removes a negative.
    std::vector<double> neg_log_weights;
    // V = attraction_scale * V+ - repulsion_scale * V-. Anything other than
    // equal scales breaks anti-symmetry; exposed for ablations only.
    double attraction_scale = 1.0;
    double repulsion_scale = 1.0;
    TemperatureReduction reduction = TemperatureReduction::SumFields;
    // Divide each temperature's field by its RMS scale lambda. Without it the
    // loss tracks the raw ||V||^2 and decays toward equilibrium.
    bool normalize_drift = true;

    // Throws std::invalid_argument on any violated invariant.
    void validate(std::size_t n_x, std::size_t n_neg) const;
};

// -||x_i - y_j|| / tau_eff
Matrix kernel_logits(const Matrix& x, const Matrix& y, double tau_eff);

// Raw drifting field at a single (already effective) temperature.
Matrix compute_drift_raw(const Matrix& x, const Matrix& y_pos, const Matrix& y_neg, const DriftSpec& spec,
                         double tau);

// S_j: weighted mean cross distance divided by sqrt(C). Negative columns use
// neg_weights (may be empty for unit weights); entries flagged in neg_mask
// are excluded.
double feature_distance_scale(const Matrix& dist_pos, const Matrix& dist_neg, const std::vector<double>& neg_weights,
                              const Mask* neg_mask, std::size_t feature_dim);

inline constexpr double kLambdaFloor = 1e-8;

struct NormalizedDrift {
    Matrix field;
    double lambda = 0.0;
};

// lambda = sqrt(mean_i ||V_i||^2 / C), floored at kLambdaFloor.
NormalizedDrift drift_normalize(const Matrix& v, std::size_t feature_dim);

struct DriftResult {
    Matrix field;                 // sum over temperatures of normalized fields
    std::vector<Matrix> per_tau;  // normalized field per temperature
    std::vector<double> lambdas;  // drift normalization scale per temperature
    double feature_scale = 1.0;   // S_j
    double lambda() const { return lambdas.front(); }
};

// Feature-normalized, multi-temperature field in normalized feature units.
// The feature dimension C is x_feat.cols().
DriftResult aggregate_drift(const Matrix& x_feat, const Matrix& pos_feat, const Matrix& neg_feat,
                            const DriftSpec& spec);

// Weight on unconditional negatives realizing CFG strength alpha.
double cfg_weight(double alpha, std::size_t n_neg, std::size_t n_unc);
double cfg_alpha(double w, std::size_t n_neg, std::size_t n_unc);

// Field induced by the squared-MMD loss with a Gaussian kernel of width sigma.
Matrix mmd_drift(const Matrix& x, const Matrix& y_pos, const Matrix& y_neg, double sigma);

}  // namespace drifting
