#include "drifting/features.hpp"

#include <cmath>
#include <stdexcept>

#include "drifting/rng.hpp"

namespace drifting {

IdentityFeatures::IdentityFeatures(std::size_t dim) : dim_(dim) {
    if (dim == 0) throw std::invalid_argument("IdentityFeatures: dim must be positive");
}

Matrix IdentityFeatures::apply(const Matrix& x) const {
    if (x.cols() != dim_) throw std::invalid_argument("IdentityFeatures: dimension mismatch");
    return x;
}

Matrix IdentityFeatures::pullback(const Matrix& x, const Matrix& cotangent) const {
    if (x.cols() != dim_ || cotangent.cols() != dim_ || cotangent.rows() != x.rows()) {
        throw std::invalid_argument("IdentityFeatures: dimension mismatch");
    }
    return cotangent;
}

RandomTanhFeatures::RandomTanhFeatures(std::size_t in_dim, std::size_t out_dim, std::uint64_t seed, double scale)
    : seed_(seed) {
    if (in_dim == 0 || out_dim == 0) throw std::invalid_argument("RandomTanhFeatures: dims must be positive");
    Rng rng(seed);
    weight_ = draw_normal(rng, out_dim, in_dim);
    const double s = scale / std::sqrt(static_cast<double>(in_dim));
    for (double& w : weight_.values()) w *= s;
    bias_.resize(out_dim);
    for (double& b : bias_) b = 0.5 * rng.normal();
}

std::string RandomTanhFeatures::name() const {
    return "tanh:" + std::to_string(out_dim()) + ":" + std::to_string(seed_);
}

Matrix RandomTanhFeatures::apply(const Matrix& x) const {
    if (x.cols() != in_dim()) throw std::invalid_argument("RandomTanhFeatures: dimension mismatch");
    Matrix out(x.rows(), out_dim());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t o = 0; o < out_dim(); ++o) {
            double z = bias_[o];
            for (std::size_t k = 0; k < in_dim(); ++k) z += weight_(o, k) * x(i, k);
            out(i, o) = std::tanh(z);
        }
    }
    return out;
}

Matrix RandomTanhFeatures::pullback(const Matrix& x, const Matrix& cotangent) const {
    if (x.cols() != in_dim() || cotangent.cols() != out_dim() || cotangent.rows() != x.rows()) {
        throw std::invalid_argument("RandomTanhFeatures: dimension mismatch");
    }
    const Matrix y = apply(x);
    Matrix out(x.rows(), in_dim());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t o = 0; o < out_dim(); ++o) {
            const double g = cotangent(i, o) * (1.0 - y(i, o) * y(i, o));
            for (std::size_t k = 0; k < in_dim(); ++k) out(i, k) += g * weight_(o, k);
        }
    }
    return out;
}

FeatureSet identity_feature_set(std::size_t dim) {
    return {std::make_shared<IdentityFeatures>(dim)};
}

FeatureSet parse_feature_set(const std::vector<std::string>& entries, std::size_t data_dim) {
    FeatureSet set;
    for (const auto& e : entries) {
        if (e == "identity") {
            set.push_back(std::make_shared<IdentityFeatures>(data_dim));
            continue;
        }
        if (e.rfind("tanh:", 0) == 0) {
            const std::string rest = e.substr(5);
            const auto colon = rest.find(':');
            const std::size_t out = std::stoul(rest.substr(0, colon));
            const std::uint64_t seed = colon == std::string::npos ? 0 : std::stoull(rest.substr(colon + 1));
            set.push_back(std::make_shared<RandomTanhFeatures>(data_dim, out, seed));
            continue;
        }
        throw std::invalid_argument("unknown feature map: " + e);
    }
    if (set.empty()) throw std::invalid_argument("feature set must be nonempty");
    return set;
}

}  // namespace drifting
