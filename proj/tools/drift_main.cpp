// drift train|ablate|diagnose
//
// Exit codes: 0 success, 1 runtime or check failure, 2 invalid configuration.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "drifting/ablation.hpp"
#include "drifting/config.hpp"
#include "drifting/diagnostics.hpp"
#include "drifting/io.hpp"
#include "drifting/parallel.hpp"

using namespace drifting;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

struct RunOptions {
    std::string config_path;
    std::vector<std::string> sets;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
};

ExperimentConfig load(const RunOptions& o) {
    ConfigDoc doc = load_config_file(o.config_path);
    if (o.seed) apply_override(doc, "seed=" + std::to_string(*o.seed));
    if (o.out) apply_override(doc, "out.dir=" + *o.out);
    for (const auto& s : o.sets) apply_override(doc, s);
    return resolve_config(doc);
}

std::filesystem::path prepare_dir(const std::string& dir) {
    std::filesystem::path p(dir);
    std::filesystem::create_directories(p);
    return p;
}

int cmd_train(const RunOptions& o) {
    const ExperimentConfig cfg = load(o);
    const auto dir = prepare_dir(cfg.out_dir);
    write_file_atomic((dir / "resolved.cfg").string(), resolved_config_text(cfg));
    const ExperimentResult res = run_experiment(cfg.train, cfg.target, cfg.out_dir);
    std::printf("steps %zu  loss %s  energy_distance %s", cfg.train.steps,
                res.trace.empty() ? "nan" : format_double(res.trace.back().loss).c_str(),
                format_double(res.final_eval.energy_distance).c_str());
    for (std::size_t k = 0; k < res.final_eval.mode_fractions.size(); ++k) {
        std::printf("  mode_%zu %s", k, format_double(res.final_eval.mode_fractions[k]).c_str());
    }
    std::printf("\nwrote %s\n", (dir / "trace.csv").string().c_str());
    return kExitOk;
}

int cmd_ablate(const std::string& suite_name, const RunOptions& o, std::size_t repeats) {
    AblationSuite suite;
    try {
        suite = parse_ablation_suite(suite_name);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("ablate", 0, "", e.what());
    }
    const ExperimentConfig cfg = load(o);
    if (repeats == 0) repeats = suite == AblationSuite::Allocation ? 3 : 1;
    const auto dir = prepare_dir(cfg.out_dir);
    write_file_atomic((dir / "resolved.cfg").string(), resolved_config_text(cfg));
    const auto rows = run_ablation(suite, cfg, repeats);
    const std::string csv = ablation_csv(suite, rows);
    const auto path = dir / ("ablation_" + std::string(to_string(suite)) + ".csv");
    write_file_atomic(path.string(), csv);
    std::cout << csv << "wrote " << path.string() << "\n";
    return kExitOk;
}

struct DiagnoseOptions {
    std::string what;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    std::string out = "out";
    std::size_t m = 3;
    std::size_t probes = 32;
    std::size_t samples = 100000;
    double tau = 0.5;
    double sigma = 0.5;
};

int cmd_diagnose(const DiagnoseOptions& o) {
    std::string report;
    bool ok = true;
    if (o.what == "identifiability") {
        if (o.m < 2) throw ConfigError("diagnose", 0, "--m", "need at least 2 basis densities");
        BasisSpec basis;
        basis.sigma = o.sigma;
        for (std::size_t i = 0; i < o.m; ++i) {
            basis.centers.push_back({-2.0 + 4.0 * static_cast<double>(i) / static_cast<double>(o.m - 1)});
        }
        Matrix probes(o.probes, 1);
        for (std::size_t k = 0; k < o.probes; ++k) {
            probes(k, 0) = -3.0 + 6.0 * static_cast<double>(k) / static_cast<double>(o.probes - 1);
        }
        Rng rng(o.seed);
        const AuditReport r = identifiability_audit(basis, o.tau, probes, o.samples, rng);
        report = audit_report_text(r);
        ok = r.passed;
    } else {
        std::vector<SuiteResult> results;
        if (o.what == "oracle") {
            results.push_back(oracle_suite(o.trials ? o.trials : 200, o.seed));
        } else if (o.what == "gradcheck") {
            results = gradcheck_suite(o.trials ? o.trials : 20, o.seed);
        } else if (o.what == "mmd") {
            results.push_back(mmd_suite(o.trials ? o.trials : 50, o.seed));
        } else {
            throw ConfigError("diagnose", 0, "", "unknown check '" + o.what + "'");
        }
        report = suite_report_text(results);
        for (const auto& r : results) {
            if (!r.passed()) {
                ok = false;
                std::cerr << "FAILED " << r.name << ": max_err " << format_double(r.max_err) << " > "
                          << format_double(r.tolerance) << "\n";
            }
        }
    }
    const auto dir = prepare_dir(o.out);
    const auto path = dir / ("diagnose_" + o.what + ".txt");
    write_file_atomic(path.string(), report);
    std::cout << report << "wrote " << path.string() << "\n";
    return ok ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
    threads_from_env();
    CLI::App app{"Drifting-field generator training and diagnostics"};
    app.require_subcommand(1);

    RunOptions train_opts;
    auto* train = app.add_subcommand("train", "Train a generator from a config file");
    train->add_option("config", train_opts.config_path, "Config file")->required();
    train->add_option("--set", train_opts.sets, "Override key=value (repeatable)");
    train->add_option("--seed", train_opts.seed, "Override the seed");
    train->add_option("--out", train_opts.out, "Override the output directory");

    RunOptions ablate_opts;
    std::string suite;
    std::size_t repeats = 0;
    auto* ablate = app.add_subcommand("ablate", "Run an ablation suite");
    ablate->add_option("suite", suite, "antisymmetry | allocation | normalization")->required();
    ablate->add_option("config", ablate_opts.config_path, "Base config file")->required();
    ablate->add_option("--set", ablate_opts.sets, "Override key=value (repeatable)");
    ablate->add_option("--seed", ablate_opts.seed, "Override the seed");
    ablate->add_option("--out", ablate_opts.out, "Override the output directory");
    ablate->add_option("--repeats", repeats, "Seeds per variant (default 3 for allocation, else 1)");

    DiagnoseOptions diag;
    auto* diagnose = app.add_subcommand("diagnose", "Run oracle and audit checks");
    diagnose->add_option("what", diag.what, "oracle | gradcheck | mmd | identifiability")->required();
    diagnose->add_option("--trials", diag.trials, "Random instances (per mode for oracle)");
    diagnose->add_option("--seed", diag.seed, "Seed");
    diagnose->add_option("--out", diag.out, "Report directory");
    diagnose->add_option("--m", diag.m, "Basis size for identifiability");
    diagnose->add_option("--probes", diag.probes, "Probe points for identifiability");
    diagnose->add_option("--samples", diag.samples, "Monte-Carlo samples for identifiability");
    diagnose->add_option("--tau", diag.tau, "Kernel temperature for identifiability");
    diagnose->add_option("--sigma", diag.sigma, "Basis width for identifiability");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*train) return cmd_train(train_opts);
        if (*ablate) return cmd_ablate(suite, ablate_opts, repeats);
        return cmd_diagnose(diag);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}
