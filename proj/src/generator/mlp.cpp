#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

#include "drifting/generator.hpp"

namespace drifting {

Activation parse_activation(std::string_view s) {
    if (s == "tanh") return Activation::Tanh;
    if (s == "smooth-relu") return Activation::SmoothRelu;
    throw std::invalid_argument("unknown activation: " + std::string(s));
}

std::string_view to_string(Activation a) { return a == Activation::Tanh ? "tanh" : "smooth-relu"; }

AlphaEmbed parse_alpha_embed(std::string_view s) {
    if (s == "none") return AlphaEmbed::None;
    if (s == "scalar-append") return AlphaEmbed::ScalarAppend;
    throw std::invalid_argument("unknown alpha embedding: " + std::string(s));
}

std::string_view to_string(AlphaEmbed a) { return a == AlphaEmbed::None ? "none" : "scalar-append"; }

void GeneratorConfig::validate() const {
    if (noise_dim == 0 || out_dim == 0) throw std::invalid_argument("GeneratorConfig: dims must be positive");
    if (hidden.empty()) throw std::invalid_argument("GeneratorConfig: hidden widths must be nonempty");
    for (auto w : hidden) {
        if (w == 0) throw std::invalid_argument("GeneratorConfig: hidden width must be positive");
    }
    if (n_classes == 0) throw std::invalid_argument("GeneratorConfig: n_classes must be positive");
    if (style) {
        if (style->tokens == 0 || style->vocab == 0) throw std::invalid_argument("GeneratorConfig: empty style codebook");
        if (class_embed_dim == 0) {
            throw std::invalid_argument("GeneratorConfig: style tokens need class_embed_dim > 0");
        }
    }
    if (!output_bias.empty() && output_bias.size() != out_dim) {
        throw std::invalid_argument("GeneratorConfig: output_bias size must equal out_dim");
    }
    if (!(init_scale > 0.0) || !(output_weight_scale >= 0.0)) {
        throw std::invalid_argument("GeneratorConfig: invalid init scale");
    }
}

std::size_t GeneratorConfig::input_dim() const {
    return noise_dim + class_embed_dim + (alpha_embed == AlphaEmbed::ScalarAppend ? 1 : 0);
}

std::size_t GeneratorParams::parameter_count() const {
    std::size_t n = 0;
    for (const auto& t : tensors) n += t.data.size();
    return n;
}

GeneratorParams GeneratorParams::zeros_like() const {
    GeneratorParams z = *this;
    for (auto& t : z.tensors) std::fill(t.data.begin(), t.data.end(), 0.0);
    z.revision = 0;
    return z;
}

bool GeneratorParams::same_layout(const GeneratorParams& other) const {
    if (tensors.size() != other.tensors.size()) return false;
    for (std::size_t k = 0; k < tensors.size(); ++k) {
        const auto &a = tensors[k], &b = other.tensors[k];
        if (a.name != b.name || a.rows != b.rows || a.cols != b.cols || a.data.size() != b.data.size()) return false;
    }
    return true;
}

GeneratorParams init_generator(const GeneratorConfig& config, Rng& rng) {
    config.validate();
    GeneratorParams p;
    p.n_layers = config.layer_count();
    std::size_t fan_in = config.input_dim();
    for (std::size_t l = 0; l < p.n_layers; ++l) {
        const bool last = l + 1 == p.n_layers;
        const std::size_t fan_out = last ? config.out_dim : config.hidden[l];
        Tensor w{"layer" + std::to_string(l) + ".weight", fan_out, fan_in, std::vector<double>(fan_out * fan_in)};
        double s = config.init_scale / std::sqrt(static_cast<double>(fan_in));
        if (last) s *= config.output_weight_scale;
        for (double& v : w.data) v = s * rng.normal();
        Tensor b{"layer" + std::to_string(l) + ".bias", 1, fan_out, std::vector<double>(fan_out, 0.0)};
        if (last && !config.output_bias.empty()) b.data = config.output_bias;
        p.tensors.push_back(std::move(w));
        p.tensors.push_back(std::move(b));
        fan_in = fan_out;
    }
    if (config.class_embed_dim > 0) {
        Tensor e{"class_embed", config.n_classes, config.class_embed_dim,
                 std::vector<double>(config.n_classes * config.class_embed_dim)};
        for (double& v : e.data) v = rng.normal();
        p.class_index = p.tensors.size();
        p.tensors.push_back(std::move(e));
    }
    if (config.style) {
        Tensor e{"style_embed", config.style->vocab, config.class_embed_dim,
                 std::vector<double>(config.style->vocab * config.class_embed_dim)};
        const double s = 1.0 / std::sqrt(static_cast<double>(config.style->tokens));
        for (double& v : e.data) v = s * rng.normal();
        p.style_index = p.tensors.size();
        p.tensors.push_back(std::move(e));
    }
    return p;
}

namespace {

double activate(Activation a, double z) {
    if (a == Activation::Tanh) return std::tanh(z);
    // softplus, written to avoid overflow for large z
    return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double activation_grad(Activation a, double z, double h) {
    if (a == Activation::Tanh) return 1.0 - h * h;
    return 1.0 / (1.0 + std::exp(-z));
}

// out = h W^T + b, rows in parallel.
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMat>;
using MutMap = Eigen::Map<RowMat>;

ConstMap view(const Matrix& m) { return {m.values().data(), static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols())}; }
MutMap view(Matrix& m) { return {m.values().data(), static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols())}; }
ConstMap view(const Tensor& t) { return {t.data.data(), static_cast<Eigen::Index>(t.rows), static_cast<Eigen::Index>(t.cols)}; }
MutMap view(Tensor& t) { return {t.data.data(), static_cast<Eigen::Index>(t.rows), static_cast<Eigen::Index>(t.cols)}; }

// z = h W^T + b
Matrix linear(const Matrix& h, const Tensor& w, const Tensor& b) {
    Matrix z(h.rows(), w.rows);
    view(z).noalias() = view(h) * view(w).transpose();
    view(z).rowwise() += view(b).row(0);
    return z;
}

void check_conditioning(const GeneratorConfig& config, const Conditioning& cond, std::size_t rows) {
    if (cond.class_id >= config.n_classes) throw std::invalid_argument("generate: class_id out of range");
    if (!(cond.alpha >= 1.0) || !std::isfinite(cond.alpha)) throw std::invalid_argument("generate: alpha must be >= 1");
    if (config.style) {
        if (cond.style_indices.size() != rows * config.style->tokens) {
            throw std::invalid_argument("generate: style index count mismatch");
        }
        for (auto s : cond.style_indices) {
            if (s >= config.style->vocab) throw std::invalid_argument("generate: style index out of range");
        }
    }
}

}  // namespace

Generated generate(const GeneratorConfig& config, const GeneratorParams& params, const Matrix& noise,
                   const Conditioning& cond) {
    require_valid(noise, "generate(noise)");
    if (noise.cols() != config.noise_dim) throw std::invalid_argument("generate: noise dimension mismatch");
    if (params.n_layers != config.layer_count()) throw std::invalid_argument("generate: params do not match config");
    const std::size_t n = noise.rows();
    check_conditioning(config, cond, n);

    Matrix input(n, config.input_dim());
    const std::size_t e = config.class_embed_dim;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < config.noise_dim; ++k) input(i, k) = noise(i, k);
        for (std::size_t k = 0; k < e; ++k) {
            double c = params.tensors[*params.class_index].at(cond.class_id, k);
            if (config.style) {
                const Tensor& st = params.tensors[*params.style_index];
                for (std::size_t t = 0; t < config.style->tokens; ++t) {
                    c += st.at(cond.style_indices[i * config.style->tokens + t], k);
                }
            }
            input(i, config.noise_dim + k) = c;
        }
        if (config.alpha_embed == AlphaEmbed::ScalarAppend) input(i, config.noise_dim + e) = std::log(cond.alpha);
    }

    Generated g;
    g.cache.cond = cond;
    g.cache.revision = params.revision;
    g.cache.activations.push_back(std::move(input));
    for (std::size_t l = 0; l < params.n_layers; ++l) {
        Matrix z = linear(g.cache.activations.back(), params.weight(l), params.bias(l));
        if (l + 1 == params.n_layers) {
            g.samples = z;
            g.cache.pre_activations.push_back(std::move(z));
            break;
        }
        Matrix h = z;
        for (double& v : h.values()) v = activate(config.activation, v);
        g.cache.pre_activations.push_back(std::move(z));
        g.cache.activations.push_back(std::move(h));
    }
    return g;
}

GeneratorParams backprop(const GeneratorConfig& config, const GeneratorParams& params, const ForwardCache& cache,
                         const Matrix& grad_out) {
    if (cache.revision != params.revision || cache.activations.size() != params.n_layers) {
        throw std::logic_error("backprop: stale forward cache");
    }
    const std::size_t n = cache.activations.front().rows();
    if (grad_out.rows() != n || grad_out.cols() != config.out_dim) {
        throw std::invalid_argument("backprop: grad_out shape mismatch");
    }
    GeneratorParams grads = params.zeros_like();
    Matrix delta = grad_out;
    for (std::size_t l = params.n_layers; l-- > 0;) {
        const Matrix& h = cache.activations[l];
        const Tensor& w = params.weight(l);
        Tensor& gw = grads.weight(l);
        Tensor& gb = grads.bias(l);
        view(gw).noalias() = view(delta).transpose() * view(h);
        view(gb).row(0) = view(delta).colwise().sum();
        Matrix prev(n, w.cols);
        view(prev).noalias() = view(delta) * view(w);
        if (l > 0) {
            const Matrix& z = cache.pre_activations[l - 1];
            for (std::size_t k = 0; k < prev.size(); ++k) {
                prev.values()[k] *= activation_grad(config.activation, z.values()[k], h.values()[k]);
            }
        }
        delta = std::move(prev);
    }

    // delta is now d/d(input); route the conditioning block to the embeddings.
    const std::size_t e = config.class_embed_dim;
    if (e > 0) {
        Tensor& gc = grads.tensors[*grads.class_index];
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < e; ++k) {
                const double d = delta(i, config.noise_dim + k);
                gc.at(cache.cond.class_id, k) += d;
                if (config.style) {
                    Tensor& gs = grads.tensors[*grads.style_index];
                    for (std::size_t t = 0; t < config.style->tokens; ++t) {
                        gs.at(cache.cond.style_indices[i * config.style->tokens + t], k) += d;
                    }
                }
            }
        }
    }
    return grads;
}

NoiseBatch draw_noise(Rng& rng, std::size_t n, const GeneratorConfig& config) {
    if (n == 0) throw std::invalid_argument("draw_noise: n must be positive");
    NoiseBatch b;
    b.noise = draw_normal(rng, n, config.noise_dim);
    if (config.style) {
        b.style_indices.resize(n * config.style->tokens);
        for (auto& s : b.style_indices) s = static_cast<std::size_t>(rng.below(config.style->vocab));
    }
    return b;
}

}  // namespace drifting
