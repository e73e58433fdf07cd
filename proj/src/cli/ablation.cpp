#include "drifting/ablation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "drifting/io.hpp"
#include "drifting/parallel.hpp"

namespace drifting {

AblationSuite parse_ablation_suite(std::string_view s) {
    if (s == "antisymmetry") return AblationSuite::Antisymmetry;
    if (s == "allocation") return AblationSuite::Allocation;
    if (s == "normalization") return AblationSuite::Normalization;
    throw std::invalid_argument("unknown ablation suite: " + std::string(s));
}

std::string_view to_string(AblationSuite s) {
    switch (s) {
        case AblationSuite::Antisymmetry: return "antisymmetry";
        case AblationSuite::Allocation: return "allocation";
        case AblationSuite::Normalization: return "normalization";
    }
    return "?";
}

std::vector<AblationVariant> ablation_variants(AblationSuite suite, const TrainConfig& base) {
    std::vector<AblationVariant> out;
    switch (suite) {
        case AblationSuite::Antisymmetry: {
            const struct {
                const char* name;
                double a, b;
            } grid[] = {{"default", 1.0, 1.0},   {"1.5x-attraction", 1.5, 1.0}, {"1.5x-repulsion", 1.0, 1.5},
                        {"2x-attraction", 2.0, 1.0}, {"2x-repulsion", 1.0, 2.0},    {"attraction-only", 1.0, 0.0}};
            for (const auto& g : grid) {
                TrainConfig t = base;
                t.drift.attraction_scale = g.a;
                t.drift.repulsion_scale = g.b;
                out.push_back({g.name, t});
            }
            break;
        }
        case AblationSuite::Allocation: {
            const std::size_t budget = base.classes_per_step * base.n_neg;
            for (std::size_t n_pos : {std::size_t{1}, std::size_t{16}, std::size_t{64}}) {
                TrainConfig t = base;
                t.n_pos = n_pos;
                t.push_per_step = base.push_per_step ? base.push_per_step : base.n_pos;
                t.queue_class_capacity = std::max(base.queue_class_capacity, n_pos);
                out.push_back({"pos-" + std::to_string(n_pos), t});
            }
            for (std::size_t nc : {std::size_t{4}, std::size_t{2}, std::size_t{1}}) {
                if (budget % nc != 0 || budget / nc < 2) continue;
                TrainConfig t = base;
                t.classes_per_step = nc;
                t.n_neg = budget / nc;
                t.n_pos = t.n_neg;
                t.push_per_step = base.push_per_step ? base.push_per_step : base.n_pos;
                t.queue_class_capacity = std::max(base.queue_class_capacity, t.n_pos);
                out.push_back({"classes-" + std::to_string(nc) + "-pos-neg-" + std::to_string(t.n_neg), t});
            }
            break;
        }
        case AblationSuite::Normalization:
            for (auto mode : {KernelNormalization::DualAxis, KernelNormalization::YAxis, KernelNormalization::None,
                              KernelNormalization::Expectation}) {
                TrainConfig t = base;
                t.drift.normalization = mode;
                out.push_back({std::string(to_string(mode)), t});
            }
            break;
    }
    return out;
}

std::vector<AblationRow> run_ablation(AblationSuite suite, const ExperimentConfig& config, std::size_t repeats) {
    if (repeats == 0) throw std::invalid_argument("run_ablation: repeats must be >= 1");
    const auto variants = ablation_variants(suite, config.train);
    std::vector<AblationRow> rows(variants.size() * repeats);
    for (std::size_t v = 0; v < variants.size(); ++v) {
        for (std::size_t r = 0; r < repeats; ++r) {
            AblationRow& row = rows[v * repeats + r];
            row.variant = variants[v].name;
            row.repeat = r;
            row.train = variants[v].train;
            row.train.seed = config.train.seed + r;
        }
    }
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(rows.size());
    std::vector<std::string> errors(rows.size());
#pragma omp parallel for schedule(dynamic) num_threads(thread_count())
    for (std::ptrdiff_t k = 0; k < n; ++k) {
        try {
            const ExperimentResult res = run_experiment(rows[k].train, config.target);
            rows[k].energy_distance = res.final_eval.energy_distance;
            const auto& f = res.final_eval.mode_fractions;
            rows[k].mode_frac_min =
                f.empty() ? std::numeric_limits<double>::quiet_NaN() : *std::min_element(f.begin(), f.end());
        } catch (const std::exception& e) {
            errors[k] = rows[k].variant + ": " + e.what();
        }
    }
    for (const auto& e : errors) {
        if (!e.empty()) throw std::runtime_error("ablation variant failed: " + e);
    }
    return rows;
}

std::string ablation_csv(AblationSuite suite, const std::vector<AblationRow>& rows) {
    std::string out =
        "suite,variant,repeat,seed,classes_per_step,n_pos,n_neg,attraction_scale,repulsion_scale,normalization,"
        "energy_distance,mode_frac_min\n";
    for (const auto& r : rows) {
        out += std::string(to_string(suite)) + "," + r.variant + "," + std::to_string(r.repeat) + "," +
               std::to_string(r.train.seed) + "," + std::to_string(r.train.classes_per_step) + "," +
               std::to_string(r.train.n_pos) + "," + std::to_string(r.train.n_neg) + "," +
               format_double(r.train.drift.attraction_scale) + "," + format_double(r.train.drift.repulsion_scale) +
               "," + std::string(to_string(r.train.drift.normalization)) + "," + format_double(r.energy_distance) +
               "," + format_double(r.mode_frac_min) + "\n";
    }
    return out;
}

double median_energy(const std::vector<AblationRow>& rows, const std::string& variant) {
    std::vector<double> v;
    for (const auto& r : rows) {
        if (r.variant == variant) v.push_back(r.energy_distance);
    }
    if (v.empty()) throw std::invalid_argument("median_energy: no rows for " + variant);
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace drifting
