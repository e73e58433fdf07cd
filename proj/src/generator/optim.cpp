#include <cmath>
#include <stdexcept>

#include "drifting/generator.hpp"

namespace drifting {

void adam_step(AdamState& opt, GeneratorParams& params, const GeneratorParams& grads) {
    if (!params.same_layout(grads)) throw std::invalid_argument("adam_step: gradient layout mismatch");
    if (opt.m.empty()) {
        for (const auto& t : params.tensors) {
            opt.m.emplace_back(t.data.size(), 0.0);
            opt.v.emplace_back(t.data.size(), 0.0);
        }
    }
    if (opt.m.size() != params.tensors.size()) throw std::invalid_argument("adam_step: moment layout mismatch");

    ++opt.step;
    const double bc1 = 1.0 - std::pow(opt.beta1, static_cast<double>(opt.step));
    const double bc2 = 1.0 - std::pow(opt.beta2, static_cast<double>(opt.step));
    for (std::size_t t = 0; t < params.tensors.size(); ++t) {
        auto& p = params.tensors[t].data;
        const auto& g = grads.tensors[t].data;
        auto& m = opt.m[t];
        auto& v = opt.v[t];
        for (std::size_t k = 0; k < p.size(); ++k) {
            m[k] = opt.beta1 * m[k] + (1.0 - opt.beta1) * g[k];
            v[k] = opt.beta2 * v[k] + (1.0 - opt.beta2) * g[k] * g[k];
            const double mhat = m[k] / bc1;
            const double vhat = v[k] / bc2;
            p[k] -= opt.lr * (mhat / (std::sqrt(vhat) + opt.eps) + opt.weight_decay * p[k]);
        }
    }
    ++params.revision;
}

EmaState make_ema(const GeneratorParams& params, double decay) {
    if (!(decay >= 0.0 && decay < 1.0)) throw std::invalid_argument("make_ema: decay must be in [0, 1)");
    return EmaState{decay, params};
}

void ema_update(EmaState& ema, const GeneratorParams& params) {
    if (!ema.shadow.same_layout(params)) throw std::invalid_argument("ema_update: layout mismatch");
    const double d = ema.decay;
    for (std::size_t t = 0; t < params.tensors.size(); ++t) {
        auto& s = ema.shadow.tensors[t].data;
        const auto& p = params.tensors[t].data;
        for (std::size_t k = 0; k < s.size(); ++k) s[k] = d * s[k] + (1.0 - d) * p[k];
    }
    ++ema.shadow.revision;
}

}  // namespace drifting
