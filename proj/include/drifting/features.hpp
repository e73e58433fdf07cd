#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "drifting/matrix.hpp"

namespace drifting {

// A differentiable map phi applied row-wise to a sample batch.
class FeatureMap {
public:
    virtual ~FeatureMap() = default;
    virtual std::string name() const = 0;
    virtual std::size_t in_dim() const = 0;
    virtual std::size_t out_dim() const = 0;
    virtual Matrix apply(const Matrix& x) const = 0;
    // Row-wise J(x)^T * cotangent.
    virtual Matrix pullback(const Matrix& x, const Matrix& cotangent) const = 0;
};

class IdentityFeatures final : public FeatureMap {
public:
    explicit IdentityFeatures(std::size_t dim);
    std::string name() const override { return "identity"; }
    std::size_t in_dim() const override { return dim_; }
    std::size_t out_dim() const override { return dim_; }
    Matrix apply(const Matrix& x) const override;
    Matrix pullback(const Matrix& x, const Matrix& cotangent) const override;

private:
    std::size_t dim_;
};

// phi(x) = tanh(W x + b) with fixed Gaussian W (scaled by 1/sqrt(in)) and b.
class RandomTanhFeatures final : public FeatureMap {
public:
    RandomTanhFeatures(std::size_t in_dim, std::size_t out_dim, std::uint64_t seed, double scale = 1.0);
    std::string name() const override;
    std::size_t in_dim() const override { return weight_.cols(); }
    std::size_t out_dim() const override { return weight_.rows(); }
    Matrix apply(const Matrix& x) const override;
    Matrix pullback(const Matrix& x, const Matrix& cotangent) const override;

private:
    Matrix weight_;  // out x in
    std::vector<double> bias_;
    std::uint64_t seed_;
};

// Ordered collection of feature maps; the drifting loss sums over them.
using FeatureSet = std::vector<std::shared_ptr<const FeatureMap>>;

FeatureSet identity_feature_set(std::size_t dim);

// Parses "identity" or "tanh:<out_dim>[:<seed>]" entries.
FeatureSet parse_feature_set(const std::vector<std::string>& entries, std::size_t data_dim);

}  // namespace drifting
