#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "drifting/drift.hpp"
#include "drifting/features.hpp"
#include "drifting/generator.hpp"
#include "drifting/queue.hpp"
#include "drifting/rng.hpp"
#include "drifting/targets.hpp"

namespace drifting {

enum class AlphaLaw {
    Fixed,  // alpha = alpha_fixed
    Power,  // p(alpha) proportional to alpha^-k on [1, alpha_max]
};

struct TrainConfig {
    std::size_t classes_per_step = 4;
    std::size_t n_pos = 64;
    std::size_t n_neg = 64;
    std::size_t n_unc = 16;

    AlphaLaw alpha_law = AlphaLaw::Fixed;
    double alpha_fixed = 1.0;
    double alpha_power = 3.0;
    double alpha_max = 4.0;

    DriftSpec drift;
    std::vector<std::string> features{"identity"};
    GeneratorConfig generator;

    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.95;
    double adam_eps = 1e-8;
    double weight_decay = 0.0;
    double ema_decay = 0.999;

    std::size_t queue_class_capacity = 128;
    std::size_t queue_unc_capacity = 1000;
    std::size_t push_per_step = 0;  // 0 = n_pos fresh reals per class group

    std::size_t steps = 2000;
    std::size_t eval_every = 100;
    std::size_t eval_samples = 1024;  // per class, generated and target
    double eval_alpha = 1.0;
    double mode_radius = 1.0;
    bool eval_use_ema = true;
    bool record_wall_time = false;

    std::uint64_t seed = 0;

    void validate() const;
};

// Draw alpha from the configured law.
double sample_alpha(const TrainConfig& config, Rng& rng);

struct TraceRecord {
    std::size_t step = 0;
    double loss = 0.0;
    double v_norm_sq = 0.0;
    double energy_distance = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> mode_fractions;
    double wall_ms = 0.0;
};

struct TrainState {
    TrainConfig config;
    TargetSpec target;
    FeatureSet features;
    GeneratorParams params;
    AdamState opt;
    EmaState ema;
    QueueBank queues;
    Rng rng;
    Matrix eval_target;  // fixed reference sample, eval_samples per class
    std::size_t step = 0;
};

// Initializes the generator and fills every queue to capacity.
TrainState make_train_state(const TrainConfig& config, const TargetSpec& target);

// One per-class group within a step.
struct ClassGroup {
    std::size_t slot = 0;
    std::size_t class_id = 0;
};

struct GroupOutcome {
    double loss = 0.0;
    double v_norm_sq = 0.0;
    double alpha = 1.0;
    double unc_weight = 0.0;
    GeneratorParams grads;
};

std::vector<ClassGroup> plan_groups(const TrainState& state, const Rng& step_rng);
// Loss and parameter gradients of a single group; reads state only.
GroupOutcome evaluate_group(const TrainState& state, const ClassGroup& group, const Rng& step_rng);

// Runs one optimization step (push fresh reals, per-class losses, Adam, EMA).
// The returned record carries loss and field norm; evaluation fields stay
// empty until evaluate() fills them.
TraceRecord train_step(TrainState& state);

struct EvalResult {
    double energy_distance = 0.0;
    std::vector<double> mode_fractions;
    Matrix generated;
};

Matrix sample_model(const TrainState& state, std::size_t class_id, double alpha, std::size_t n, Rng& rng,
                    bool use_ema);
EvalResult evaluate(const TrainState& state);

struct ExperimentResult {
    std::vector<TraceRecord> trace;  // every evaluated step
    EvalResult final_eval;
    TrainState state;
};

// Trains for config.steps. When out_dir is nonempty, writes trace.csv, one
// snap_<step>.csv per evaluation, and generator checkpoints.
ExperimentResult run_experiment(const TrainConfig& config, const TargetSpec& target, const std::string& out_dir = "");

std::string trace_header(std::size_t n_modes);
std::string trace_row(const TraceRecord& r);

}  // namespace drifting
