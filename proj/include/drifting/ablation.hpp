#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "drifting/config.hpp"

namespace drifting {

enum class AblationSuite { Antisymmetry, Allocation, Normalization };

AblationSuite parse_ablation_suite(std::string_view s);
std::string_view to_string(AblationSuite s);

struct AblationVariant {
    std::string name;
    TrainConfig train;
};

// Variant grid of a suite, derived from the base training config.
// antisymmetry: attraction/repulsion scale pairs; allocation: N_pos sweep at
// fixed N_neg, then (N_c, N_pos = N_neg) at fixed N_c * N_neg;
// normalization: every kernel normalization mode.
std::vector<AblationVariant> ablation_variants(AblationSuite suite, const TrainConfig& base);

struct AblationRow {
    std::string variant;
    std::size_t repeat = 0;
    TrainConfig train;
    double energy_distance = 0.0;
    double mode_frac_min = 0.0;  // NaN when the target has no modes
};

// Runs every variant `repeats` times with seeds seed, seed + 1, ...
// Variants run as independent tasks across the configured threads.
std::vector<AblationRow> run_ablation(AblationSuite suite, const ExperimentConfig& config, std::size_t repeats);

std::string ablation_csv(AblationSuite suite, const std::vector<AblationRow>& rows);

// Median energy distance over the repeats of a variant.
double median_energy(const std::vector<AblationRow>& rows, const std::string& variant);

}  // namespace drifting
