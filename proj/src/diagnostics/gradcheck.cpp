#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "drifting/diagnostics.hpp"
#include "drifting/loss.hpp"

namespace drifting {

double relative_error(double analytic, double numeric, double floor) {
    const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
    return std::abs(analytic - numeric) / denom;
}

namespace {

double inner(const Matrix& a, const Matrix& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a.values()[k] * b.values()[k];
    return s;
}

}  // namespace

GradCheckResult grad_check_generator(const GeneratorConfig& config, Rng& rng, std::size_t batch) {
    config.validate();
    if (batch == 0) throw std::invalid_argument("grad_check_generator: batch must be >= 1");
    GeneratorParams params = init_generator(config, rng);
    NoiseBatch noise = draw_noise(rng, batch, config);
    Conditioning cond{static_cast<std::size_t>(rng.below(config.n_classes)), 1.0 + 3.0 * rng.uniform(),
                      std::move(noise.style_indices)};
    const Matrix grad_out = draw_normal(rng, batch, config.out_dim);

    const Generated g = generate(config, params, noise.noise, cond);
    const GeneratorParams analytic = backprop(config, params, g.cache, grad_out);

    const double h = 1e-4;
    GradCheckResult res;
    for (std::size_t t = 0; t < params.tensors.size(); ++t) {
        auto& data = params.tensors[t].data;
        for (std::size_t k = 0; k < data.size(); ++k) {
            const double keep = data[k];
            data[k] = keep + h;
            const double up = inner(generate(config, params, noise.noise, cond).samples, grad_out);
            data[k] = keep - h;
            const double down = inner(generate(config, params, noise.noise, cond).samples, grad_out);
            data[k] = keep;
            const double numeric = (up - down) / (2.0 * h);
            res.max_rel_err = std::max(res.max_rel_err, relative_error(analytic.tensors[t].data[k], numeric));
            ++res.checked;
        }
    }
    return res;
}

GradCheckResult grad_check_drifting_loss(const Matrix& x, const Matrix& pos, const DriftSpec& spec,
                                         const FeatureSet& features, double h) {
    const DriftBatch batch{x, pos, nullptr, nullptr, 0.0};
    const LossResult frozen = drifting_loss_and_grad(batch, spec, features);

    GradCheckResult res;
    Matrix probe = x;
    for (std::size_t k = 0; k < probe.size(); ++k) {
        const double keep = probe.values()[k];
        probe.values()[k] = keep + h;
        const double up = frozen_target_loss(probe, features, frozen);
        probe.values()[k] = keep - h;
        const double down = frozen_target_loss(probe, features, frozen);
        probe.values()[k] = keep;
        const double numeric = (up - down) / (2.0 * h);
        res.max_rel_err = std::max(res.max_rel_err, relative_error(frozen.grad_x.values()[k], numeric));
        ++res.checked;
    }
    return res;
}

double mmd_sample_loss(std::span<const double> x, const Matrix& y_pos, const Matrix& y_neg, double sigma) {
    auto xi_mean = [&](const Matrix& y) {
        double s = 0.0;
        for (std::size_t j = 0; j < y.rows(); ++j) {
            double r = 0.0;
            for (std::size_t k = 0; k < x.size(); ++k) r += (x[k] - y(j, k)) * (x[k] - y(j, k));
            s += std::exp(-r / (2.0 * sigma * sigma));
        }
        return s / static_cast<double>(y.rows());
    };
    return 2.0 * xi_mean(y_neg) - 2.0 * xi_mean(y_pos);
}

GradCheckResult grad_check_mmd(const Matrix& x, const Matrix& y_pos, const Matrix& y_neg, double sigma, double h) {
    const Matrix v = mmd_drift(x, y_pos, y_neg, sigma);
    GradCheckResult res;
    std::vector<double> probe(x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t k = 0; k < x.cols(); ++k) {
            std::copy(x.row(i).begin(), x.row(i).end(), probe.begin());
            probe[k] = x(i, k) + h;
            const double up = mmd_sample_loss(probe, y_pos, y_neg, sigma);
            probe[k] = x(i, k) - h;
            const double down = mmd_sample_loss(probe, y_pos, y_neg, sigma);
            const double numeric = -0.5 * (up - down) / (2.0 * h);
            res.max_rel_err = std::max(res.max_rel_err, relative_error(v(i, k), numeric));
            ++res.checked;
        }
    }
    return res;
}

}  // namespace drifting
