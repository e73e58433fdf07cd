#include <chrono>
#include <cmath>
#include <stdexcept>

#include "drifting/loss.hpp"
#include "drifting/metrics.hpp"
#include "drifting/parallel.hpp"
#include "drifting/training.hpp"

namespace drifting {

namespace {

// Sub-stream keys. Every random quantity is drawn from
// rng.split(step).split(key).split(slot), so streams never depend on how
// many draws another consumer made.
enum StreamKey : std::uint64_t {
    kInitParams = 1,
    kWarmup = 2,
    kEvalTarget = 3,
    kEvalNoise = 4,
    kClasses = 10,
    kPush = 11,
    kPushUnc = 12,
    kGroup = 13,
    kAlpha = 20,
    kNoise = 21,
    kPositives = 22,
    kUncond = 23,
};

}  // namespace

void TrainConfig::validate() const {
    if (classes_per_step == 0) throw std::invalid_argument("train: classes_per_step must be >= 1");
    if (n_pos < 1) throw std::invalid_argument("train: n_pos must be >= 1");
    if (n_neg < 2) throw std::invalid_argument("train: n_neg must be >= 2");
    if (n_pos > queue_class_capacity) throw std::invalid_argument("train: n_pos exceeds class queue capacity");
    if (n_unc > queue_unc_capacity) throw std::invalid_argument("train: n_unc exceeds unconditional queue capacity");
    if (!(alpha_fixed >= 1.0) || !(alpha_max >= 1.0)) throw std::invalid_argument("train: alpha must be >= 1");
    if (!(eval_alpha >= 1.0)) throw std::invalid_argument("eval: alpha must be >= 1");
    if (!(lr > 0.0)) throw std::invalid_argument("optim: lr must be > 0");
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
        throw std::invalid_argument("optim: betas must be in [0, 1)");
    }
    if (!(ema_decay >= 0.0 && ema_decay < 1.0)) throw std::invalid_argument("ema: decay must be in [0, 1)");
    if (eval_every == 0 || eval_samples == 0) throw std::invalid_argument("eval: cadence and samples must be positive");
    if (!(mode_radius > 0.0)) throw std::invalid_argument("eval: mode_radius must be > 0");
    if (features.empty()) throw std::invalid_argument("features: at least one feature map");
    drift.validate(n_neg, n_neg);
    generator.validate();
}

double sample_alpha(const TrainConfig& config, Rng& rng) {
    if (config.alpha_law == AlphaLaw::Fixed) return config.alpha_fixed;
    const double k = config.alpha_power, hi = config.alpha_max;
    if (hi == 1.0) return 1.0;
    const double u = rng.uniform();
    // inverse CDF of alpha^-k on [1, hi]
    if (std::abs(k - 1.0) < 1e-12) return std::exp(u * std::log(hi));
    const double e = 1.0 - k;
    return std::pow(1.0 + u * (std::pow(hi, e) - 1.0), 1.0 / e);
}

TrainState make_train_state(const TrainConfig& config, const TargetSpec& target) {
    config.validate();
    target.validate();
    if (config.generator.out_dim != target.dim) throw std::invalid_argument("generator out_dim must equal target dim");
    if (config.generator.n_classes != target.n_classes()) {
        throw std::invalid_argument("generator n_classes must equal target class count");
    }
    Rng base(config.seed);
    Rng init = base.split(kInitParams);
    GeneratorParams params = init_generator(config.generator, init);

    TrainState s{config,
                 target,
                 parse_feature_set(config.features, target.dim),
                 params,
                 AdamState{config.lr, config.beta1, config.beta2, config.adam_eps, config.weight_decay, 0, {}, {}},
                 make_ema(params, config.ema_decay),
                 QueueBank(target.n_classes(), target.dim, config.queue_class_capacity, config.queue_unc_capacity),
                 base,
                 {},
                 0};

    const Rng warm = base.split(kWarmup);
    for (std::size_t c = 0; c < target.n_classes(); ++c) {
        Rng r = warm.split(c);
        queue_push(s.queues, c, sample_target(target, c, config.queue_class_capacity, r));
    }
    if (config.n_unc > 0) {
        Rng r = warm.split(kUnconditional);
        queue_push(s.queues, kUnconditional, sample_unconditional(target, config.queue_unc_capacity, r));
    }

    const Rng eval = base.split(kEvalTarget);
    for (std::size_t c = 0; c < target.n_classes(); ++c) {
        Rng r = eval.split(c);
        s.eval_target = vstack(s.eval_target, sample_target(target, c, config.eval_samples, r));
    }
    return s;
}

std::vector<ClassGroup> plan_groups(const TrainState& state, const Rng& step_rng) {
    const std::size_t n_classes = state.target.n_classes();
    const std::size_t nc = state.config.classes_per_step;
    Rng r = step_rng.split(kClasses);
    std::vector<std::size_t> ids;
    if (nc <= n_classes) {
        const std::vector<double> w(n_classes, 1.0);
        ids = draw_categorical(r, w, nc, false);
    } else {
        for (std::size_t g = 0; g < nc; ++g) ids.push_back(static_cast<std::size_t>(r.below(n_classes)));
    }
    std::vector<ClassGroup> groups;
    for (std::size_t g = 0; g < ids.size(); ++g) groups.push_back({g, ids[g]});
    return groups;
}

GroupOutcome evaluate_group(const TrainState& state, const ClassGroup& group, const Rng& step_rng) {
    const TrainConfig& cfg = state.config;
    const Rng g = step_rng.split(kGroup).split(group.slot);

    GroupOutcome out;
    Rng ra = g.split(kAlpha);
    out.alpha = sample_alpha(cfg, ra);
    out.unc_weight = cfg.n_unc > 0 ? cfg_weight(out.alpha, cfg.n_neg, cfg.n_unc) : 0.0;

    Rng rn = g.split(kNoise);
    NoiseBatch noise = draw_noise(rn, cfg.n_neg, cfg.generator);
    Conditioning cond{group.class_id, out.alpha, std::move(noise.style_indices)};
    Generated gen = generate(cfg.generator, state.params, noise.noise, cond);

    Rng rp = g.split(kPositives);
    const Matrix pos = queue_sample(state.queues, group.class_id, cfg.n_pos, rp);
    Matrix unc;
    if (out.unc_weight > 0.0) {
        Rng ru = g.split(kUncond);
        unc = queue_sample(state.queues, kUnconditional, cfg.n_unc, ru);
    }

    DriftBatch batch{gen.samples, pos, nullptr, unc.empty() ? nullptr : &unc, out.unc_weight};
    const LossResult lr = drifting_loss_and_grad(batch, cfg.drift, state.features);
    out.loss = lr.loss;
    out.v_norm_sq = lr.v_norm_sq;
    out.grads = backprop(cfg.generator, state.params, gen.cache, lr.grad_x);
    return out;
}

TraceRecord train_step(TrainState& state) {
    const auto t0 = std::chrono::steady_clock::now();
    const TrainConfig& cfg = state.config;
    const std::size_t step = state.step + 1;
    const Rng step_rng = state.rng.split(step);

    const std::vector<ClassGroup> groups = plan_groups(state, step_rng);

    // fresh reals arrive before sampling, as from a data loader
    const std::size_t push = cfg.push_per_step ? cfg.push_per_step : cfg.n_pos;
    const Rng rpush = step_rng.split(kPush);
    for (const auto& g : groups) {
        Rng r = rpush.split(g.slot);
        queue_push(state.queues, g.class_id, sample_target(state.target, g.class_id, push, r));
    }
    if (cfg.n_unc > 0) {
        Rng r = step_rng.split(kPushUnc);
        queue_push(state.queues, kUnconditional, sample_unconditional(state.target, cfg.n_unc, r));
    }

    TraceRecord rec;
    rec.step = step;
    // groups are independent; the reduction below runs in slot order
    std::vector<GroupOutcome> outcomes(groups.size());
    const long long ng = static_cast<long long>(groups.size());
#pragma omp parallel for schedule(static) num_threads(thread_count()) if (ng > 1)
    for (long long k = 0; k < ng; ++k) outcomes[k] = evaluate_group(state, groups[k], step_rng);

    GeneratorParams total = state.params.zeros_like();
    for (const auto& o : outcomes) {
        rec.loss += o.loss;
        rec.v_norm_sq += o.v_norm_sq;
        for (std::size_t t = 0; t < total.tensors.size(); ++t) {
            auto& dst = total.tensors[t].data;
            const auto& src = o.grads.tensors[t].data;
            for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
        }
    }
    adam_step(state.opt, state.params, total);
    ema_update(state.ema, state.params);
    state.step = step;

    if (cfg.record_wall_time) {
        rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    }
    return rec;
}

Matrix sample_model(const TrainState& state, std::size_t class_id, double alpha, std::size_t n, Rng& rng,
                    bool use_ema) {
    NoiseBatch noise = draw_noise(rng, n, state.config.generator);
    Conditioning cond{class_id, alpha, std::move(noise.style_indices)};
    const GeneratorParams& p = use_ema ? state.ema.shadow : state.params;
    return generate(state.config.generator, p, noise.noise, cond).samples;
}

EvalResult evaluate(const TrainState& state) {
    const TrainConfig& cfg = state.config;
    const Rng r = state.rng.split(kEvalNoise);
    EvalResult out;
    for (std::size_t c = 0; c < state.target.n_classes(); ++c) {
        Rng rc = r.split(c);
        out.generated =
            vstack(out.generated, sample_model(state, c, cfg.eval_alpha, cfg.eval_samples, rc, cfg.eval_use_ema));
    }
    out.energy_distance = energy_distance(out.generated, state.eval_target);
    out.mode_fractions = mode_coverage(out.generated, state.target.mode_centers(), cfg.mode_radius);
    return out;
}

}  // namespace drifting
