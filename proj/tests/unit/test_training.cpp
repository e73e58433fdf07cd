#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "drifting/diagnostics.hpp"
#include "drifting/io.hpp"
#include "drifting/loss.hpp"
#include "drifting/metrics.hpp"
#include "drifting/training.hpp"
#include "support.hpp"

using namespace drifting;
using testing::random_matrix;

namespace {

double loop_mean_distance(const Matrix& a, const Matrix& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.rows(); ++j) {
            double d = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) d += (a(i, k) - b(j, k)) * (a(i, k) - b(j, k));
            s += std::sqrt(d);
        }
    }
    return s / static_cast<double>(a.rows() * b.rows());
}

TrainConfig quick_config() {
    TrainConfig c;
    c.generator.hidden = {16};
    c.generator.noise_dim = 1;
    c.generator.out_dim = 1;
    c.generator.n_classes = 2;
    c.generator.class_embed_dim = 4;
    c.n_pos = 16;
    c.n_neg = 16;
    c.n_unc = 0;
    c.classes_per_step = 2;
    c.queue_class_capacity = 32;
    c.steps = 20;
    c.eval_every = 5;
    c.eval_samples = 64;
    return c;
}

TargetSpec two_class_target() {
    TargetSpec t;
    t.dim = 1;
    t.classes = {{{{-2.0}, 0.5}}, {{{2.0}, 0.5}}};
    return t;
}

}  // namespace

TEST_SUITE("training") {

TEST_CASE("zero field gives zero loss and gradient") {
    Rng rng(1);
    const Matrix x = random_matrix(rng, 6, 2), y = random_matrix(rng, 5, 2);
    const DriftBatch b{x, y, &y, nullptr, 0.0};
    const LossResult r = drifting_loss_and_grad(b, DriftSpec{}, identity_feature_set(2));
    CHECK(r.loss == 0.0);
    CHECK(r.v_norm_sq == 0.0);
    for (double g : r.grad_x.values()) CHECK(g == 0.0);
}

TEST_CASE("loss is the mean over rows and components") {
    LossResult frozen;
    FeatureLoss fl;
    fl.drift.feature_scale = 1.0;
    fl.targets.push_back(Matrix{{1.0, 2.0}});
    frozen.per_feature.push_back(fl);
    CHECK(frozen_target_loss(Matrix{{0.0, 0.0}}, identity_feature_set(2), frozen) == 2.5);
}

TEST_CASE("loss equals the mean squared field") {
    Rng rng(2);
    for (auto red : {TemperatureReduction::SumFields, TemperatureReduction::SumLosses}) {
        DriftSpec s;
        s.reduction = red;
        const Matrix x = random_matrix(rng, 8, 2), pos = random_matrix(rng, 7, 2);
        const DriftBatch b{x, pos, nullptr, nullptr, 0.0};
        const LossResult r = drifting_loss_and_grad(b, s, {std::make_shared<IdentityFeatures>(2),
                                                           std::make_shared<RandomTanhFeatures>(2, 4, 3)});
        CHECK(std::abs(r.loss - r.v_norm_sq) <= 1e-10);
    }
}

TEST_CASE("grad_x matches finite differences with frozen targets") {
    Rng rng(3);
    for (int t = 0; t < 6; ++t) {
        DriftSpec s;
        s.normalization = static_cast<KernelNormalization>(t % 4);
        s.reduction = t % 2 ? TemperatureReduction::SumLosses : TemperatureReduction::SumFields;
        const Matrix x = random_matrix(rng, 5, 2), pos = random_matrix(rng, 6, 2);
        const FeatureSet f{std::make_shared<IdentityFeatures>(2), std::make_shared<RandomTanhFeatures>(2, 5, 7)};
        CHECK(grad_check_drifting_loss(x, pos, s, f).max_rel_err <= 1e-4);
    }
}

TEST_CASE("grad_x is the scaled negative field and never differentiates the target") {
    Rng rng(4);
    const Matrix x = random_matrix(rng, 6, 2), pos = random_matrix(rng, 5, 2), neg = random_matrix(rng, 7, 2);
    const DriftBatch b{x, pos, &neg, nullptr, 0.0};
    const LossResult r = drifting_loss_and_grad(b, DriftSpec{}, identity_feature_set(2));
    const DriftResult& d = r.per_feature[0].drift;
    const double n = static_cast<double>(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double expected = -2.0 * d.field.values()[k] / n / d.feature_scale;
        CHECK(std::abs(r.grad_x.values()[k] - expected) <= 1e-14);
    }
}

TEST_CASE("unconditional negatives with zero weight are inert") {
    Rng rng(5);
    const Matrix x = random_matrix(rng, 6, 2), pos = random_matrix(rng, 5, 2), unc = random_matrix(rng, 4, 2);
    const DriftBatch with{x, pos, nullptr, &unc, 0.0}, without{x, pos, nullptr, nullptr, 0.0};
    const LossResult a = drifting_loss_and_grad(with, DriftSpec{}, identity_feature_set(2));
    const LossResult b = drifting_loss_and_grad(without, DriftSpec{}, identity_feature_set(2));
    CHECK(a.loss == b.loss);
    CHECK(testing::bytes_equal(a.grad_x, b.grad_x));
}

TEST_CASE("queue push keeps the newest items in arrival order") {
    QueueBank bank(10, 1, 3, 5);
    for (int k = 0; k < 5; ++k) queue_push(bank, 7, Matrix{{static_cast<double>(k)}});
    CHECK(bank.at(7).contents() == Matrix{{2.0}, {3.0}, {4.0}});
    CHECK(bank.at(8).size() == 0);
    CHECK_THROWS_AS(queue_push(bank, 7, Matrix{{1.0, 2.0}}), std::invalid_argument);
    CHECK_THROWS_AS(bank.at(10), std::out_of_range);
    const QueueBank paper(1, 2, 128, 1000);
    CHECK(paper.at(0).capacity() == 128);
    CHECK(paper.at(kUnconditional).capacity() == 1000);
}

TEST_CASE("queue contents equal the truncated push history") {
    Rng rng(6);
    for (int t = 0; t < 50; ++t) {
        const std::size_t cap = testing::random_size(rng, 1, 12);
        SampleQueue q(cap, 2);
        std::vector<std::vector<double>> history;
        const std::size_t pushes = testing::random_size(rng, 1, 10);
        for (std::size_t p = 0; p < pushes; ++p) {
            const Matrix items = random_matrix(rng, testing::random_size(rng, 1, 6), 2);
            q.push(items);
            for (std::size_t i = 0; i < items.rows(); ++i) history.emplace_back(items.row(i).begin(), items.row(i).end());
            if (q.size() > 0 && rng.uniform() < 0.5) q.sample(testing::random_size(rng, 1, q.size()), rng);
        }
        const std::size_t keep = std::min(cap, history.size());
        const Matrix c = q.contents();
        REQUIRE(c.rows() == keep);
        for (std::size_t i = 0; i < keep; ++i) {
            const auto& h = history[history.size() - keep + i];
            CHECK(c(i, 0) == h[0]);
            CHECK(c(i, 1) == h[1]);
        }
    }
}

TEST_CASE("queue sampling") {
    SampleQueue q(5, 1);
    q.push(Matrix{{0.0}, {1.0}, {2.0}});
    Rng rng(7);
    Matrix all = q.sample(3, rng);
    std::vector<double> v(all.values().begin(), all.values().end());
    std::sort(v.begin(), v.end());
    CHECK(v == std::vector<double>{0.0, 1.0, 2.0});
    CHECK_THROWS_AS(q.sample(4, rng), std::invalid_argument);

    std::map<int, int> pairs;
    for (int t = 0; t < 3000; ++t) {
        const Matrix s = q.sample(2, rng);
        CHECK(s(0, 0) != s(1, 0));
        pairs[static_cast<int>(s(0, 0) + s(1, 0))] += 1;
    }
    const double sd = std::sqrt(3000.0 * (1.0 / 3.0) * (2.0 / 3.0));
    REQUIRE(pairs.size() == 3);
    for (const auto& [key, n] : pairs) CHECK(std::abs(n - 1000.0) <= 3.0 * sd);
}

TEST_CASE("target sampling") {
    Rng rng(8);
    TargetSpec point;
    point.classes = {{{{1.0, -1.0}, 1e-6}}};
    const Matrix p = sample_target(point, 0, 1000, rng);
    for (std::size_t i = 0; i < p.rows(); ++i) {
        CHECK(std::hypot(p(i, 0) - 1.0, p(i, 1) + 1.0) <= 1e-3);
    }

    const Matrix b = sample_target(bimodal_target(), 0, 10000, rng);
    std::size_t right = 0;
    for (std::size_t i = 0; i < b.rows(); ++i) right += b(i, 0) > 0.0;
    CHECK(std::abs(static_cast<double>(right) - 5000.0) <= 3.0 * std::sqrt(2500.0));

    const TargetSpec ring = ring_target(2.0, 0.1);
    const Matrix r = sample_target(ring, 0, 5000, rng);
    for (std::size_t i = 0; i < r.rows(); ++i) CHECK(std::abs(std::hypot(r(i, 0), r(i, 1)) - 2.0) <= 0.4 + 1e-12);

    const TargetSpec board = checkerboard_target(4, 1.0);
    const Matrix c = sample_target(board, 0, 5000, rng);
    for (std::size_t i = 0; i < c.rows(); ++i) {
        CHECK(std::abs(c(i, 0)) <= 2.0);
        CHECK(std::abs(c(i, 1)) <= 2.0);
        const long cx = static_cast<long>(std::floor(c(i, 0) + 2.0)), cy = static_cast<long>(std::floor(c(i, 1) + 2.0));
        CHECK((cx + cy) % 2 == 0);
    }
    CHECK_THROWS_AS(sample_target(bimodal_target(), 1, 5, rng), std::invalid_argument);
}

TEST_CASE("energy distance examples") {
    Rng rng(9);
    const Matrix a = random_matrix(rng, 20, 2);
    CHECK(energy_distance(a, a) <= 1e-12);
    CHECK(energy_distance(Matrix{{0.0}}, Matrix{{1.0}}) == 2.0);
    for (int t = 0; t < 10; ++t) {
        const Matrix x = random_matrix(rng, testing::random_size(rng, 1, 30), 3);
        const Matrix y = random_matrix(rng, testing::random_size(rng, 1, 30), 3, 2.0);
        const double expected =
            2.0 * loop_mean_distance(x, y) - loop_mean_distance(x, x) - loop_mean_distance(y, y);
        CHECK(std::abs(energy_distance(x, y) - expected) <= 1e-12);
        CHECK(energy_distance(x, y) == serial::energy_distance(x, y));
    }
}

TEST_CASE("mode coverage examples") {
    const std::vector<std::vector<double>> centers{{-2.0, 0.0}, {2.0, 0.0}};
    CHECK(mode_coverage(Matrix(10, 2, 0.0), {{0.0, 0.0}, {5.0, 5.0}}, 1.0) == std::vector<double>{1.0, 0.0});
    const Matrix halves{{-2.0, 0.1}, {-1.9, 0.0}, {2.1, 0.0}, {2.0, -0.2}};
    CHECK(mode_coverage(halves, centers, 1.0) == std::vector<double>{0.5, 0.5});

    Rng rng(10);
    const auto f = mode_coverage(sample_target(bimodal_target(), 0, 10000, rng), centers, 1.0);
    for (double v : f) {
        CHECK(v >= 0.47);
        CHECK(v <= 0.53);
    }
}

TEST_CASE("alpha sampling follows the power law") {
    TrainConfig c;
    c.alpha_law = AlphaLaw::Power;
    c.alpha_power = 3.0;
    c.alpha_max = 4.0;
    Rng rng(11);
    double below2 = 0.0;
    const int n = 20000;
    for (int k = 0; k < n; ++k) {
        const double a = sample_alpha(c, rng);
        REQUIRE(a >= 1.0);
        REQUIRE(a <= 4.0);
        below2 += a < 2.0;
    }
    // P(alpha < 2) = (1 - 2^-2) / (1 - 4^-2) for density alpha^-3 on [1, 4]
    const double p = 0.75 / (1.0 - 1.0 / 16.0);
    CHECK(std::abs(below2 / n - p) <= 4.0 * std::sqrt(p * (1.0 - p) / n));
}

TEST_CASE("class group order does not change the step") {
    TrainConfig c = quick_config();
    c.classes_per_step = 2;
    const TrainState s = make_train_state(c, two_class_target());
    const Rng step = s.rng.split(1);
    auto groups = plan_groups(s, step);
    REQUIRE(groups.size() == 2);
    const GroupOutcome a = evaluate_group(s, groups[0], step), b = evaluate_group(s, groups[1], step);
    std::swap(groups[0], groups[1]);
    const GroupOutcome b2 = evaluate_group(s, groups[0], step), a2 = evaluate_group(s, groups[1], step);
    CHECK(std::abs((a.loss + b.loss) - (b2.loss + a2.loss)) <= 1e-12);
    for (std::size_t t = 0; t < a.grads.tensors.size(); ++t) {
        for (std::size_t k = 0; k < a.grads.tensors[t].data.size(); ++k) {
            const double fwd = a.grads.tensors[t].data[k] + b.grads.tensors[t].data[k];
            const double rev = b2.grads.tensors[t].data[k] + a2.grads.tensors[t].data[k];
            CHECK(std::abs(fwd - rev) <= 1e-12);
        }
    }
}

TEST_CASE("identical seeds give identical traces and parameters") {
    TrainConfig c = quick_config();
    c.n_unc = 8;
    c.alpha_law = AlphaLaw::Power;
    c.generator.alpha_embed = AlphaEmbed::ScalarAppend;
    const TargetSpec t = two_class_target();
    const ExperimentResult a = run_experiment(c, t), b = run_experiment(c, t);
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t k = 0; k < a.trace.size(); ++k) CHECK(trace_row(a.trace[k]) == trace_row(b.trace[k]));
    CHECK(checkpoint_to_string(a.state.params) == checkpoint_to_string(b.state.params));

    c.seed = 1;
    const ExperimentResult other = run_experiment(c, t);
    CHECK(checkpoint_to_string(other.state.params) != checkpoint_to_string(a.state.params));
}

TEST_CASE("forcing alpha to one makes unconditional negatives inert") {
    TrainConfig c = quick_config();
    c.alpha_fixed = 1.0;
    const TargetSpec t = two_class_target();
    c.n_unc = 0;
    const ExperimentResult without = run_experiment(c, t);
    c.n_unc = 8;
    const ExperimentResult with = run_experiment(c, t);
    REQUIRE(with.trace.size() == without.trace.size());
    for (std::size_t k = 0; k < with.trace.size(); ++k) CHECK(trace_row(with.trace[k]) == trace_row(without.trace[k]));
    CHECK(checkpoint_to_string(with.state.params) == checkpoint_to_string(without.state.params));
}

TEST_CASE("trace format") {
    CHECK(trace_header(2) == "step,loss,v_norm_sq,energy_distance,mode_frac_0,mode_frac_1,wall_ms");
    TraceRecord r;
    r.step = 12;
    r.loss = 0.5;
    r.v_norm_sq = 0.5;
    r.energy_distance = 0.25;
    r.mode_fractions = {0.5, 0.375};
    CHECK(trace_row(r) == "12,0.5,0.5,0.25,0.5,0.375,0");
}

TEST_CASE("config validation") {
    TrainConfig c = quick_config();
    c.n_neg = 1;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = quick_config();
    c.n_pos = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = quick_config();
    c.n_pos = c.queue_class_capacity + 1;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = quick_config();
    CHECK_THROWS_AS(make_train_state(c, bimodal_target()), std::invalid_argument);
}

TEST_CASE("raw-field loss decays to the finite-sample floor on the bimodal target") {
    TrainConfig c;
    c.drift.temperatures = {0.05, 0.2, 1.0};
    c.drift.normalize_drift = false;
    c.n_unc = 0;
    const TargetSpec t = bimodal_target();

    // Loss of one group whose generated batch is an exact target draw.
    Rng rng(12);
    double floor = 0.0;
    const int reps = 100;
    for (int r = 0; r < reps; ++r) {
        const Matrix x = sample_target(t, 0, c.n_neg, rng), pos = sample_target(t, 0, c.n_pos, rng);
        floor += drifting_loss_and_grad({x, pos, nullptr, nullptr, 0.0}, c.drift, identity_feature_set(2)).loss;
    }
    floor *= static_cast<double>(c.classes_per_step) / reps;

    TrainState s = make_train_state(c, t);
    std::vector<double> loss;
    for (int k = 0; k < 2000; ++k) loss.push_back(train_step(s).loss);
    double start = 0.0, end = 0.0;
    for (int k = 0; k < 10; ++k) start += loss[k] / 10.0;
    for (int k = 1900; k < 2000; ++k) end += loss[k] / 100.0;
    MESSAGE("start " << start << " end " << end << " floor " << floor << " step50 " << loss[49]);
    CHECK(end < 0.1 * start);
    CHECK(end < 2.0 * floor);
}

}
