#include <algorithm>
#include <cmath>
#include <limits>

#include "drifting/diagnostics.hpp"
#include "drifting/io.hpp"

namespace drifting {

namespace {

constexpr KernelNormalization kModes[] = {KernelNormalization::DualAxis, KernelNormalization::YAxis,
                                          KernelNormalization::Expectation, KernelNormalization::None};

std::size_t between(Rng& rng, std::size_t lo, std::size_t hi) { return lo + static_cast<std::size_t>(rng.below(hi - lo + 1)); }

Matrix scaled_normal(Rng& rng, std::size_t n, std::size_t d, double scale) { return scaled(draw_normal(rng, n, d), scale); }

}  // namespace

SuiteResult antisymmetry_suite(std::size_t instances, std::uint64_t seed) {
    SuiteResult res{"antisymmetry", 0.0, 1e-12, 0};
    Rng base(seed);
    for (std::size_t t = 0; t < instances; ++t) {
        Rng rng = base.split(t);
        const std::size_t d = between(rng, 1, 4);
        const Matrix x = scaled_normal(rng, between(rng, 1, 12), d, 1.5);
        const Matrix a = scaled_normal(rng, between(rng, 1, 12), d, 1.5);
        const Matrix b = scaled_normal(rng, between(rng, 1, 12), d, 1.5);
        const double tau = 0.1 + 2.0 * rng.uniform();
        DriftSpec spec;
        spec.normalization = kModes[t % 4];
        const Matrix v = compute_drift_raw(x, a, b, spec, tau);
        const Matrix w = compute_drift_raw(x, b, a, spec, tau);
        for (std::size_t k = 0; k < v.size(); ++k) res.max_err = std::max(res.max_err, std::abs(v.values()[k] + w.values()[k]));
        ++res.cases;
    }
    return res;
}

SuiteResult oracle_suite(std::size_t trials, std::uint64_t seed) {
    SuiteResult res{"oracle", 0.0, 1e-10, 0};
    Rng base(seed);
    const double ninf = -std::numeric_limits<double>::infinity();
    for (std::size_t mi = 0; mi < 4; ++mi) {
        for (std::size_t t = 0; t < trials; ++t) {
            Rng rng = base.split(mi).split(t);
            const std::size_t d = between(rng, 1, 4), n = between(rng, 1, 10), p = between(rng, 1, 10);
            const double tau = 0.1 + 2.0 * rng.uniform();
            const Matrix x = scaled_normal(rng, n, d, 1.5);
            const Matrix pos = scaled_normal(rng, p, d, 1.5);
            DriftSpec spec;
            spec.normalization = kModes[mi];
            if (rng.uniform() < 0.25) {
                spec.attraction_scale = 0.5 + rng.uniform();
                spec.repulsion_scale = 0.5 * rng.uniform();
            }
            const std::size_t variant = t % 4;
            const bool self = variant == 1 || variant == 3, weighted = variant >= 2;
            Matrix neg = self ? x : scaled_normal(rng, between(rng, 2, 10), d, 1.5);
            if (self && n < 2) neg = vstack(neg, scaled_normal(rng, 1, d, 1.5));
            if (weighted) neg = vstack(neg, scaled_normal(rng, between(rng, 1, 6), d, 1.5));
            if (self) {
                spec.self_mask.resize(n);
                for (std::size_t i = 0; i < n; ++i) spec.self_mask[i] = static_cast<std::ptrdiff_t>(i);
            }
            if (weighted) {
                spec.neg_log_weights.assign(neg.rows(), 0.0);
                const std::size_t first = self ? n : 0;
                for (std::size_t j = first; j < neg.rows(); ++j) spec.neg_log_weights[j] = 2.0 * rng.uniform() - 1.0;
                // removing a negative must leave every row some unmasked one
                if (neg.rows() - first >= 2 && rng.uniform() < 0.5) spec.neg_log_weights.back() = ninf;
            }
            const Matrix fast = compute_drift_raw(x, pos, neg, spec, tau);
            const Matrix slow = oracle_drift(x, pos, neg, spec, tau);
            res.max_err = std::max(res.max_err, max_abs_diff(fast, slow));
            ++res.cases;
        }
    }
    return res;
}

std::vector<SuiteResult> gradcheck_suite(std::size_t trials, std::uint64_t seed) {
    SuiteResult gen{"gradcheck-generator", 0.0, 1e-4, 0};
    SuiteResult loss{"gradcheck-drifting-loss", 0.0, 1e-4, 0};
    Rng base(seed);
    GeneratorConfig config;
    config.noise_dim = 2;
    config.hidden = {8};
    config.out_dim = 2;
    const FeatureSet features = {std::make_shared<IdentityFeatures>(2), std::make_shared<RandomTanhFeatures>(2, 6, 5)};
    for (std::size_t t = 0; t < trials; ++t) {
        Rng rg = base.split(t).split(1);
        const GradCheckResult g = grad_check_generator(config, rg, 5);
        gen.max_err = std::max(gen.max_err, g.max_rel_err);
        gen.cases += g.checked;

        Rng rl = base.split(t).split(2);
        const Matrix x = scaled_normal(rl, between(rl, 3, 8), 2, 1.0);
        const Matrix pos = scaled_normal(rl, between(rl, 2, 8), 2, 1.0);
        DriftSpec spec;
        spec.normalization = kModes[t % 4];
        spec.reduction = t % 2 ? TemperatureReduction::SumLosses : TemperatureReduction::SumFields;
        const GradCheckResult l = grad_check_drifting_loss(x, pos, spec, features);
        loss.max_err = std::max(loss.max_err, l.max_rel_err);
        loss.cases += l.checked;
    }
    return {gen, loss};
}

SuiteResult mmd_suite(std::size_t instances, std::uint64_t seed) {
    SuiteResult res{"mmd", 0.0, 1e-5, 0};
    Rng base(seed);
    for (std::size_t t = 0; t < instances; ++t) {
        Rng rng = base.split(t);
        const Matrix x = draw_normal(rng, between(rng, 1, 6), 2);
        const Matrix pos = draw_normal(rng, between(rng, 1, 8), 2);
        const Matrix neg = draw_normal(rng, between(rng, 1, 8), 2);
        const double sigma = 0.5 + rng.uniform();
        const GradCheckResult g = grad_check_mmd(x, pos, neg, sigma);
        res.max_err = std::max(res.max_err, g.max_rel_err);
        res.cases += g.checked;
    }
    return res;
}

std::string suite_report_text(const std::vector<SuiteResult>& results) {
    std::string out;
    for (const auto& r : results) {
        out += r.name + ".max_err = " + format_double(r.max_err) + "\n";
        out += r.name + ".tolerance = " + format_double(r.tolerance) + "\n";
        out += r.name + ".cases = " + std::to_string(r.cases) + "\n";
        out += r.name + ".passed = " + (r.passed() ? "true" : "false") + "\n";
    }
    return out;
}

}  // namespace drifting
