#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "drifting/diagnostics.hpp"
#include "drifting/generator.hpp"
#include "support.hpp"

using namespace drifting;

namespace {

GeneratorConfig small_config() {
    GeneratorConfig c;
    c.noise_dim = 2;
    c.out_dim = 2;
    c.hidden = {8};
    return c;
}

GeneratorParams scalar_param(double w) {
    GeneratorParams p;
    p.tensors.push_back(Tensor{"w", 1, 1, {w}});
    return p;
}

double stdev(const Matrix& m) {
    double mean = 0.0, sq = 0.0;
    for (double v : m.values()) mean += v;
    mean /= static_cast<double>(m.size());
    for (double v : m.values()) sq += (v - mean) * (v - mean);
    return std::sqrt(sq / static_cast<double>(m.size()));
}

}  // namespace

TEST_SUITE("generator") {

TEST_CASE("init_generator is deterministic and produces O(1) outputs") {
    GeneratorConfig c;
    Rng a(5), b(5);
    const GeneratorParams pa = init_generator(c, a), pb = init_generator(c, b);
    REQUIRE(pa.tensors.size() == pb.tensors.size());
    for (std::size_t t = 0; t < pa.tensors.size(); ++t) CHECK(pa.tensors[t].data == pb.tensors[t].data);

    Rng rng(5);
    const Matrix noise = draw_normal(rng, 1000, c.noise_dim);
    const double s = stdev(generate(c, pa, noise, {}).samples);
    CHECK(s >= 0.1);
    CHECK(s <= 10.0);

    c.hidden.clear();
    CHECK_THROWS_AS(init_generator(c, rng), std::invalid_argument);
}

TEST_CASE("all-zero weights output the final bias") {
    const GeneratorConfig c = small_config();
    Rng rng(1);
    GeneratorParams p = init_generator(c, rng);
    for (auto& t : p.tensors) std::fill(t.data.begin(), t.data.end(), 0.0);
    p.bias(p.n_layers - 1).data = {0.25, -1.5};
    const Matrix out = generate(c, p, draw_normal(rng, 7, 2), {}).samples;
    for (std::size_t i = 0; i < 7; ++i) {
        CHECK(out(i, 0) == 0.25);
        CHECK(out(i, 1) == -1.5);
    }
}

TEST_CASE("generate is deterministic and class-sensitive") {
    GeneratorConfig c = small_config();
    c.n_classes = 3;
    c.class_embed_dim = 4;
    Rng rng(2);
    const GeneratorParams p = init_generator(c, rng);
    const Matrix noise = draw_normal(rng, 10, 2);
    const Conditioning c0{0, 1.0, {}}, c1{1, 1.0, {}};
    CHECK(generate(c, p, noise, c0).samples == generate(c, p, noise, c0).samples);
    CHECK(max_abs_diff(generate(c, p, noise, c0).samples, generate(c, p, noise, c1).samples) > 1e-6);

    CHECK_THROWS_AS(generate(c, p, draw_normal(rng, 3, 3), c0), std::invalid_argument);
    CHECK_THROWS_AS(generate(c, p, noise, Conditioning{3, 1.0, {}}), std::invalid_argument);
    CHECK_THROWS_AS(generate(c, p, noise, Conditioning{0, 0.5, {}}), std::invalid_argument);
}

TEST_CASE("alpha is inert without an alpha embedding") {
    const GeneratorConfig c = small_config();
    Rng rng(3);
    const GeneratorParams p = init_generator(c, rng);
    const Matrix noise = draw_normal(rng, 10, 2);
    CHECK(testing::bytes_equal(generate(c, p, noise, Conditioning{0, 1.0, {}}).samples,
                               generate(c, p, noise, Conditioning{0, 3.5, {}}).samples));

    GeneratorConfig with = c;
    with.alpha_embed = AlphaEmbed::ScalarAppend;
    const GeneratorParams q = init_generator(with, rng);
    CHECK(max_abs_diff(generate(with, q, noise, Conditioning{0, 1.0, {}}).samples,
                       generate(with, q, noise, Conditioning{0, 3.5, {}}).samples) > 0.0);
}

TEST_CASE("backprop linearity") {
    const GeneratorConfig c = small_config();
    Rng rng(4);
    const GeneratorParams p = init_generator(c, rng);
    const Generated g = generate(c, p, draw_normal(rng, 5, 2), {});

    const GeneratorParams zero = backprop(c, p, g.cache, Matrix(5, 2));
    for (const auto& t : zero.tensors) {
        for (double v : t.data) CHECK(v == 0.0);
    }

    const Matrix go = testing::random_matrix(rng, 5, 2);
    const GeneratorParams once = backprop(c, p, g.cache, go), twice = backprop(c, p, g.cache, scaled(go, 2.0));
    for (std::size_t t = 0; t < once.tensors.size(); ++t) {
        for (std::size_t k = 0; k < once.tensors[t].data.size(); ++k) {
            CHECK(twice.tensors[t].data[k] == 2.0 * once.tensors[t].data[k]);
        }
    }
}

TEST_CASE("backprop rejects a stale cache") {
    const GeneratorConfig c = small_config();
    Rng rng(5);
    GeneratorParams p = init_generator(c, rng);
    const Generated g = generate(c, p, draw_normal(rng, 5, 2), {});
    AdamState opt;
    adam_step(opt, p, p.zeros_like());
    CHECK_THROWS_AS(backprop(c, p, g.cache, Matrix(5, 2)), std::logic_error);
}

TEST_CASE("backprop matches finite differences on every parameter") {
    Rng rng(6);
    GeneratorConfig c = small_config();
    for (int t = 0; t < 5; ++t) CHECK(grad_check_generator(c, rng).max_rel_err <= 1e-4);

    GeneratorConfig rich = small_config();
    rich.n_classes = 3;
    rich.class_embed_dim = 3;
    rich.alpha_embed = AlphaEmbed::ScalarAppend;
    rich.style = StyleConfig{2, 5};
    rich.hidden = {6, 5};
    for (auto act : {Activation::Tanh, Activation::SmoothRelu}) {
        rich.activation = act;
        const GradCheckResult r = grad_check_generator(rich, rng);
        CHECK(r.max_rel_err <= 1e-4);
        CHECK(r.checked > 0);
    }
}

TEST_CASE("class embedding gradients touch only the class in use") {
    GeneratorConfig c = small_config();
    c.n_classes = 4;
    c.class_embed_dim = 3;
    Rng rng(7);
    const GeneratorParams p = init_generator(c, rng);
    const Generated g = generate(c, p, draw_normal(rng, 6, 2), Conditioning{2, 1.0, {}});
    const GeneratorParams grads = backprop(c, p, g.cache, testing::random_matrix(rng, 6, 2));
    REQUIRE(grads.class_index.has_value());
    const Tensor& e = grads.tensors[*grads.class_index];
    for (std::size_t k = 0; k < c.n_classes; ++k) {
        double norm = 0.0;
        for (std::size_t j = 0; j < e.cols; ++j) norm += std::abs(e.at(k, j));
        if (k == 2) {
            CHECK(norm > 0.0);
        } else {
            CHECK(norm == 0.0);
        }
    }
}

TEST_CASE("adam examples") {
    GeneratorParams p = scalar_param(0.5);
    AdamState opt;
    adam_step(opt, p, scalar_param(0.0));
    CHECK(p.tensors[0].data[0] == 0.5);

    GeneratorParams q = scalar_param(0.0);
    AdamState first;
    first.lr = 0.01;
    adam_step(first, q, scalar_param(1.0));
    CHECK(std::abs(q.tensors[0].data[0] - (-0.01 / (1.0 + first.eps))) <= 1e-10);
    CHECK(first.step == 1);

    GeneratorParams w = scalar_param(1.0);
    AdamState run;
    run.lr = 0.1;
    for (int k = 0; k < 100; ++k) adam_step(run, w, scalar_param(2.0 * w.tensors[0].data[0]));
    CHECK(std::abs(w.tensors[0].data[0]) < 0.5);

    GeneratorParams other;
    other.tensors.push_back(Tensor{"v", 1, 1, {0.0}});
    CHECK_THROWS_AS(adam_step(run, w, other), std::invalid_argument);
}

TEST_CASE("ema examples") {
    EmaState copy = make_ema(scalar_param(0.0), 0.0);
    ema_update(copy, scalar_param(3.0));
    CHECK(copy.shadow.tensors[0].data[0] == 3.0);

    EmaState slow = make_ema(scalar_param(0.0), 0.999);
    for (int k = 0; k < 1000; ++k) ema_update(slow, scalar_param(1.0));
    CHECK(slow.shadow.tensors[0].data[0] == doctest::Approx(1.0 - std::pow(0.999, 1000)).epsilon(1e-10));
    CHECK(slow.shadow.tensors[0].data[0] == doctest::Approx(0.6323).epsilon(1e-3));

    EmaState geo = make_ema(scalar_param(5.0), 0.9);
    for (int k = 1; k <= 20; ++k) {
        ema_update(geo, scalar_param(1.0));
        CHECK(geo.shadow.tensors[0].data[0] - 1.0 == doctest::Approx(4.0 * std::pow(0.9, k)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(make_ema(scalar_param(0.0), 1.0), std::invalid_argument);
}

TEST_CASE("draw_noise examples") {
    GeneratorConfig c = small_config();
    Rng rng(8);
    CHECK(draw_noise(rng, 5, c).style_indices.empty());

    c.class_embed_dim = 2;
    c.style = StyleConfig{1, 64};
    Rng a(9), b(9);
    const NoiseBatch na = draw_noise(a, 10000, c), nb = draw_noise(b, 10000, c);
    CHECK(na.noise == nb.noise);
    CHECK(na.style_indices == nb.style_indices);

    std::vector<double> counts(64, 0.0);
    for (auto s : na.style_indices) counts[s] += 1.0;
    const double p = 1.0 / 64.0, sd = std::sqrt(10000.0 * p * (1.0 - p));
    for (double n : counts) CHECK(std::abs(n - 10000.0 * p) <= 3.0 * sd + 1.0);
    CHECK_THROWS_AS(draw_noise(rng, 0, c), std::invalid_argument);
}

TEST_CASE("checkpoint round trip is exact") {
    GeneratorConfig c = small_config();
    c.n_classes = 2;
    c.class_embed_dim = 3;
    c.style = StyleConfig{2, 4};
    Rng rng(10);
    const GeneratorParams p = init_generator(c, rng);
    const std::string text = checkpoint_to_string(p);
    const GeneratorParams q = checkpoint_from_string(text);
    CHECK(q.same_layout(p));
    CHECK(q.n_layers == p.n_layers);
    CHECK(q.class_index == p.class_index);
    CHECK(q.style_index == p.style_index);
    for (std::size_t t = 0; t < p.tensors.size(); ++t) CHECK(q.tensors[t].data == p.tensors[t].data);
    CHECK(checkpoint_to_string(q) == text);
    CHECK(text.rfind("drifting-checkpoint 1\n", 0) == 0);

    const auto path = std::filesystem::temp_directory_path() / "drifting_ckpt_test.txt";
    write_checkpoint(path.string(), p);
    CHECK(checkpoint_to_string(read_checkpoint(path.string())) == text);
    std::filesystem::remove(path);

    CHECK_THROWS_AS(checkpoint_from_string("not a checkpoint\n"), std::runtime_error);
    CHECK_THROWS_AS(checkpoint_from_string(text.substr(0, text.size() / 2)), std::runtime_error);
}

}
