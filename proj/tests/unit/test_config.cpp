#include <doctest.h>

#include <string>

#include "drifting/ablation.hpp"
#include "drifting/config.hpp"

using namespace drifting;

namespace {

const char* kMinimal = "target.family = gaussian-mixture\n";

std::string error_of(const std::string& text) {
    try {
        resolve_config(parse_config_text(text, "test.cfg"));
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("minimal config resolves to the bimodal defaults") {
    const ExperimentConfig c = resolve_config(parse_config_text(kMinimal, "test.cfg"));
    CHECK(c.target.family == TargetFamily::GaussianMixture);
    CHECK(c.target.n_classes() == 1);
    CHECK(c.target.mode_centers().size() == 2);
    CHECK(c.train.generator.out_dim == 2);
    CHECK(c.train.classes_per_step == 4);
    CHECK(c.train.n_unc == 16);
}

TEST_CASE("comments and whitespace are ignored") {
    const ConfigDoc doc = parse_config_text("# header\n\n  steps =  12   # trailing\n", "a.cfg");
    REQUIRE(doc.count("steps"));
    CHECK(doc.at("steps").value == "12");
    CHECK(doc.at("steps").line == 3);
}

TEST_CASE("errors name the source, line and key") {
    CHECK(error_of("target.family = ring\nsteps = many\n").find("test.cfg:2: key 'steps'") != std::string::npos);
    CHECK(error_of("target.family = ring\nstep = 3\n").find("test.cfg:2: key 'step': unknown key") !=
          std::string::npos);
    CHECK(error_of("steps = 3\n").find("target.family") != std::string::npos);
    CHECK(error_of("target.family = ring\nno equals sign\n").find("test.cfg:2") != std::string::npos);
    CHECK(error_of("target.family = ring\nsteps = 1\nsteps = 2\n").find("duplicate") != std::string::npos);
    CHECK(error_of("target.family = ring\ntrain.n_neg = 1\n").find("n_neg") != std::string::npos);
    CHECK(error_of("target.family = blob\n").find("test.cfg:1: key 'target.family'") != std::string::npos);
    CHECK(error_of("target.family = ring\ndrift.temperatures = 0.1, -1\n").find("drift.temperatures") !=
          std::string::npos);
}

TEST_CASE("overrides replace file values") {
    ConfigDoc doc = parse_config_text(std::string(kMinimal) + "seed = 3\n", "a.cfg");
    apply_override(doc, "seed=9");
    apply_override(doc, "drift.normalization = y-axis");
    const ExperimentConfig c = resolve_config(doc);
    CHECK(c.train.seed == 9);
    CHECK(c.train.drift.normalization == KernelNormalization::YAxis);
    CHECK_THROWS_AS(apply_override(doc, "seed"), ConfigError);
    apply_override(doc, "bogus.key=1");
    try {
        resolve_config(doc);
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.source() == "--set");
        CHECK(e.key() == "bogus.key");
    }
}

TEST_CASE("resolved config text round-trips") {
    const std::string text = std::string(kMinimal) +
                             "target.centers = -2; 2\n"
                             "target.dim = 1\n"
                             "target.center_classes = 0, 1\n"
                             "target.sigma = 0.4, 0.6\n"
                             "train.alpha = power:2.5\n"
                             "drift.temperatures = 0.05, 0.2, 1\n"
                             "drift.reduction = sum-losses\n"
                             "drift.normalize_drift = false\n"
                             "features.maps = identity, tanh:8:3\n"
                             "gen.hidden = 32, 16\n"
                             "gen.alpha_embed = scalar-append\n"
                             "optim.lr = 0.0003\n";
    const ExperimentConfig a = resolve_config(parse_config_text(text, "a.cfg"));
    const std::string resolved = resolved_config_text(a);
    const ExperimentConfig b = resolve_config(parse_config_text(resolved, "resolved.cfg"));
    CHECK(resolved_config_text(b) == resolved);
    CHECK(b.target.n_classes() == 2);
    CHECK(b.train.generator.class_embed_dim == 8);
    CHECK(b.train.alpha_law == AlphaLaw::Power);
    CHECK(b.train.alpha_power == 2.5);
    CHECK_FALSE(b.train.drift.normalize_drift);
    CHECK(b.train.features.size() == 2);
    CHECK(b.train.lr == 0.0003);
    for (const auto& key : known_config_keys()) CHECK(resolved.find(key + " = ") != std::string::npos);
}

TEST_CASE("ablation variants") {
    TrainConfig base;
    const auto anti = ablation_variants(AblationSuite::Antisymmetry, base);
    REQUIRE(anti.size() == 6);
    CHECK(anti[0].name == "default");
    CHECK(anti[1].train.drift.attraction_scale == 1.5);
    CHECK(anti[5].train.drift.repulsion_scale == 0.0);

    const auto alloc = ablation_variants(AblationSuite::Allocation, base);
    const std::size_t budget = base.classes_per_step * base.n_neg;
    for (const auto& v : alloc) {
        CHECK(v.train.classes_per_step * v.train.n_neg == budget);
        CHECK_NOTHROW(v.train.validate());
    }
    CHECK(alloc[0].name == "pos-1");
    CHECK(alloc[0].train.n_pos == 1);

    const auto norm = ablation_variants(AblationSuite::Normalization, base);
    REQUIRE(norm.size() == 4);
    CHECK(norm[2].train.drift.normalization == KernelNormalization::None);
    CHECK_THROWS_AS(parse_ablation_suite("everything"), std::invalid_argument);
}

}
