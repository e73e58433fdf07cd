#include <cstdio>
#include <filesystem>
#include <stdexcept>

#include "drifting/io.hpp"
#include "drifting/training.hpp"

namespace drifting {

std::string trace_header(std::size_t n_modes) {
    std::string h = "step,loss,v_norm_sq,energy_distance";
    for (std::size_t k = 0; k < n_modes; ++k) h += ",mode_frac_" + std::to_string(k);
    h += ",wall_ms";
    return h;
}

std::string trace_row(const TraceRecord& r) {
    std::string row = std::to_string(r.step) + "," + format_double(r.loss) + "," + format_double(r.v_norm_sq) + "," +
                      format_double(r.energy_distance);
    for (double f : r.mode_fractions) row += "," + format_double(f);
    row += "," + format_double(r.wall_ms);
    return row;
}

namespace {

std::string snapshot_csv(const Matrix& generated, const Matrix& target) {
    std::string out = "kind,x,y\n";
    auto emit = [&out](const char* kind, const Matrix& m) {
        for (std::size_t i = 0; i < m.rows(); ++i) {
            out += kind;
            out += ',';
            out += format_double(m(i, 0));
            out += ',';
            // 1D targets get y = 0
            out += format_double(m.cols() > 1 ? m(i, 1) : 0.0);
            out += '\n';
        }
    };
    emit("generated", generated);
    emit("target", target);
    return out;
}

std::string snapshot_name(std::size_t step) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "snap_%06zu.csv", step);
    return buf;
}

}  // namespace

ExperimentResult run_experiment(const TrainConfig& config, const TargetSpec& target, const std::string& out_dir) {
    ExperimentResult res{{}, {}, make_train_state(config, target)};
    TrainState& state = res.state;
    const bool write = !out_dir.empty();
    std::filesystem::path dir(out_dir);
    if (write) {
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec) throw std::runtime_error("cannot create output directory " + out_dir + ": " + ec.message());
    }

    std::string trace = trace_header(target.mode_centers().size()) + "\n";
    for (std::size_t s = 1; s <= config.steps; ++s) {
        TraceRecord rec = train_step(state);
        if (s % config.eval_every != 0 && s != config.steps) continue;
        res.final_eval = evaluate(state);
        rec.energy_distance = res.final_eval.energy_distance;
        rec.mode_fractions = res.final_eval.mode_fractions;
        trace += trace_row(rec) + "\n";
        if (write) {
            write_file_atomic((dir / snapshot_name(s)).string(), snapshot_csv(res.final_eval.generated, state.eval_target));
        }
        res.trace.push_back(std::move(rec));
    }
    if (config.steps == 0) res.final_eval = evaluate(state);
    if (write) {
        write_file_atomic((dir / "trace.csv").string(), trace);
        write_checkpoint((dir / "generator.ckpt").string(), state.params);
        write_checkpoint((dir / "generator_ema.ckpt").string(), state.ema.shadow);
    }
    return res;
}

}  // namespace drifting
