#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "drifting/matrix.hpp"
#include "drifting/rng.hpp"

namespace drifting {

enum class Activation { Tanh, SmoothRelu };
enum class AlphaEmbed { None, ScalarAppend };

Activation parse_activation(std::string_view s);
std::string_view to_string(Activation a);
AlphaEmbed parse_alpha_embed(std::string_view s);
std::string_view to_string(AlphaEmbed a);

struct StyleConfig {
    std::size_t tokens = 0;
    std::size_t vocab = 0;
};

// One-step generator f(noise, class, alpha, style) -> sample. The network
// input is [noise | class embedding + summed style embeddings | log alpha],
// followed by hidden layers with a smooth activation and a linear output.
struct GeneratorConfig {
    std::size_t noise_dim = 2;
    std::size_t out_dim = 2;
    std::vector<std::size_t> hidden{64, 64};
    Activation activation = Activation::Tanh;
    std::size_t n_classes = 1;
    std::size_t class_embed_dim = 0;
    AlphaEmbed alpha_embed = AlphaEmbed::None;
    std::optional<StyleConfig> style;  // embedding width = class_embed_dim
    double init_scale = 1.0;
    double output_weight_scale = 1.0;
    std::vector<double> output_bias;  // empty = zeros

    void validate() const;
    std::size_t input_dim() const;
    std::size_t layer_count() const { return hidden.size() + 1; }
};

struct Tensor {
    std::string name;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

// Named tensors in a fixed order: layer<l>.weight (out x in), layer<l>.bias
// (1 x out) for every layer, then class_embed and style_embed when present.
// Gradients and optimizer moments use the same layout.
struct GeneratorParams {
    std::vector<Tensor> tensors;
    std::size_t n_layers = 0;
    std::optional<std::size_t> class_index;
    std::optional<std::size_t> style_index;
    // Bumped by every in-place update; a forward cache records it.
    std::uint64_t revision = 0;

    Tensor& weight(std::size_t l) { return tensors[2 * l]; }
    const Tensor& weight(std::size_t l) const { return tensors[2 * l]; }
    Tensor& bias(std::size_t l) { return tensors[2 * l + 1]; }
    const Tensor& bias(std::size_t l) const { return tensors[2 * l + 1]; }

    std::size_t parameter_count() const;
    GeneratorParams zeros_like() const;
    bool same_layout(const GeneratorParams& other) const;
};

struct Conditioning {
    std::size_t class_id = 0;
    double alpha = 1.0;
    // Row-major [rows x tokens]; empty when style tokens are disabled.
    std::vector<std::size_t> style_indices;
};

struct ForwardCache {
    std::vector<Matrix> activations;  // input of every layer, h_0 .. h_{L-1}
    std::vector<Matrix> pre_activations;
    Conditioning cond;
    std::uint64_t revision = 0;
};

GeneratorParams init_generator(const GeneratorConfig& config, Rng& rng);

struct Generated {
    Matrix samples;
    ForwardCache cache;
};

Generated generate(const GeneratorConfig& config, const GeneratorParams& params, const Matrix& noise,
                   const Conditioning& cond);

// Gradients of <grad_out, samples> with respect to every parameter tensor.
GeneratorParams backprop(const GeneratorConfig& config, const GeneratorParams& params, const ForwardCache& cache,
                         const Matrix& grad_out);

struct NoiseBatch {
    Matrix noise;
    std::vector<std::size_t> style_indices;
};

NoiseBatch draw_noise(Rng& rng, std::size_t n, const GeneratorConfig& config);

// Decoupled-weight-decay Adam.
struct AdamState {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.95;
    double eps = 1e-8;
    double weight_decay = 0.0;
    std::uint64_t step = 0;
    std::vector<std::vector<double>> m;
    std::vector<std::vector<double>> v;
};

void adam_step(AdamState& opt, GeneratorParams& params, const GeneratorParams& grads);

struct EmaState {
    double decay = 0.999;
    GeneratorParams shadow;
};

EmaState make_ema(const GeneratorParams& params, double decay);
void ema_update(EmaState& ema, const GeneratorParams& params);

// Text checkpoint, see docs/checkpoint.md.
void write_checkpoint(const std::string& path, const GeneratorParams& params);
GeneratorParams read_checkpoint(const std::string& path);
std::string checkpoint_to_string(const GeneratorParams& params);
GeneratorParams checkpoint_from_string(const std::string& text);

}  // namespace drifting
