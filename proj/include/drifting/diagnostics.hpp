#pragma once

#include <string>
#include <vector>

#include "drifting/drift.hpp"
#include "drifting/features.hpp"
#include "drifting/generator.hpp"
#include "drifting/matrix.hpp"
#include "drifting/rng.hpp"

namespace drifting {

// Literal nested-loop evaluation of the drifting field for every
// normalization mode. Independent of compute_drift_raw; small inputs only.
Matrix oracle_drift(const Matrix& x, const Matrix& y_pos, const Matrix& y_neg, const DriftSpec& spec, double tau);

inline constexpr std::size_t kOracleMaxWork = 1'000'000;

struct GradCheckResult {
    double max_rel_err = 0.0;
    std::size_t checked = 0;
};

// Relative error used by every check: |a - b| / max(|a|, |b|, floor).
double relative_error(double analytic, double numeric, double floor = 1e-6);

// Backprop vs central differences (h = 1e-4) over every parameter, on the
// scalar <grad_out, generate(...)> with random noise, class and grad_out.
GradCheckResult grad_check_generator(const GeneratorConfig& config, Rng& rng, std::size_t batch = 5);

// drifting_loss grad_x vs central differences of the loss with frozen targets.
GradCheckResult grad_check_drifting_loss(const Matrix& x, const Matrix& pos, const DriftSpec& spec,
                                         const FeatureSet& features, double h = 1e-5);

// Per-sample MMD loss (2/M) sum_j xi(x, y-_j) - (2/P) sum_i xi(x, y+_i).
double mmd_sample_loss(std::span<const double> x, const Matrix& y_pos, const Matrix& y_neg, double sigma);

// mmd_drift vs -1/2 times the central-difference gradient of mmd_sample_loss.
GradCheckResult grad_check_mmd(const Matrix& x, const Matrix& y_pos, const Matrix& y_neg, double sigma,
                               double h = 1e-5);

struct BasisSpec {
    std::vector<std::vector<double>> centers;  // m centers in R^d
    double sigma = 0.5;

    std::size_t m() const { return centers.size(); }
    std::size_t dim() const { return centers.empty() ? 0 : centers.front().size(); }
};

struct AuditReport {
    std::size_t m = 0;
    std::size_t dim = 0;
    std::size_t probes = 0;
    std::size_t mc_samples = 0;
    double tau = 0.0;
    double antisymmetry_max_err = 0.0;   // max |U_ij + U_ji| over entries
    double antisymmetry_norm = 0.0;      // ||U_ij + U_ji|| over all i < j
    double antisymmetry_std_err = 0.0;   // Monte-Carlo standard error of that norm
    std::size_t rank = 0;
    std::size_t expected_rank = 0;
    double singular_gap = 0.0;  // smallest singular value over the rank threshold
    std::vector<double> singular_values;
    double equal_mix_norm = 0.0;      // ||V_X|| for a == b
    double equal_mix_std_err = 0.0;   // its Monte-Carlo standard error
    double recovery_residual = 0.0;   // ||b_hat - a|| / ||a||
    bool passed = false;
};

// Monte-Carlo audit of the zero-drift identifiability argument using the
// unnormalized mean-shift interaction kernel k(x,y+) k(x,y-) (y+ - y-).
AuditReport identifiability_audit(const BasisSpec& basis, double tau, const Matrix& probes, std::size_t mc_samples,
                                  Rng& rng);

// Flat "key = value" text.
std::string audit_report_text(const AuditReport& r);

// Seeded randomized check suites shared by the CLI and the tests.
struct SuiteResult {
    std::string name;
    double max_err = 0.0;
    double tolerance = 0.0;
    std::size_t cases = 0;
    bool passed() const { return max_err <= tolerance; }
};

// Swapping pos and neg negates V (no mask, no weights), every mode.
SuiteResult antisymmetry_suite(std::size_t instances, std::uint64_t seed);
// compute_drift_raw vs oracle_drift, `trials` per mode, cycling through plain,
// self-masked, weighted and masked+weighted instances.
SuiteResult oracle_suite(std::size_t trials, std::uint64_t seed);
// Generator backprop and drifting-loss grad_x on a 2-8-2 tanh net.
std::vector<SuiteResult> gradcheck_suite(std::size_t trials, std::uint64_t seed);
SuiteResult mmd_suite(std::size_t instances, std::uint64_t seed);

std::string suite_report_text(const std::vector<SuiteResult>& results);

}  // namespace drifting
