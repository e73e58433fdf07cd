#include "drifting/targets.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace drifting {

TargetFamily parse_target_family(std::string_view s) {
    if (s == "gaussian-mixture") return TargetFamily::GaussianMixture;
    if (s == "ring") return TargetFamily::Ring;
    if (s == "checkerboard") return TargetFamily::Checkerboard;
    throw std::invalid_argument("unknown target family: " + std::string(s));
}

std::string_view to_string(TargetFamily f) {
    switch (f) {
        case TargetFamily::GaussianMixture: return "gaussian-mixture";
        case TargetFamily::Ring: return "ring";
        case TargetFamily::Checkerboard: return "checkerboard";
    }
    return "?";
}

std::size_t TargetSpec::n_classes() const {
    return family == TargetFamily::GaussianMixture ? classes.size() : 1;
}

std::vector<std::vector<double>> TargetSpec::mode_centers() const {
    std::vector<std::vector<double>> out;
    if (family != TargetFamily::GaussianMixture) return out;
    for (const auto& cls : classes)
        for (const auto& c : cls) out.push_back(c.center);
    return out;
}

void TargetSpec::validate() const {
    if (dim == 0) throw std::invalid_argument("TargetSpec: dim must be positive");
    switch (family) {
        case TargetFamily::GaussianMixture:
            if (classes.empty()) throw std::invalid_argument("TargetSpec: mixture needs at least one class");
            for (const auto& cls : classes) {
                if (cls.empty()) throw std::invalid_argument("TargetSpec: class without components");
                for (const auto& c : cls) {
                    if (c.center.size() != dim) throw std::invalid_argument("TargetSpec: center dimension mismatch");
                    if (!(c.sigma >= 0.0)) throw std::invalid_argument("TargetSpec: sigma must be >= 0");
                }
            }
            break;
        case TargetFamily::Ring:
            if (dim != 2) throw std::invalid_argument("TargetSpec: ring is 2D");
            if (!(ring_radius > 0.0) || !(ring_width >= 0.0)) throw std::invalid_argument("TargetSpec: bad ring");
            break;
        case TargetFamily::Checkerboard:
            if (dim != 2) throw std::invalid_argument("TargetSpec: checkerboard is 2D");
            if (checker_cells < 2 || !(checker_cell_size > 0.0)) throw std::invalid_argument("TargetSpec: bad checkerboard");
            break;
    }
}

TargetSpec bimodal_target() {
    TargetSpec t;
    t.family = TargetFamily::GaussianMixture;
    t.dim = 2;
    t.classes = {{MixtureComponent{{-2.0, 0.0}, 0.3}, MixtureComponent{{2.0, 0.0}, 0.3}}};
    return t;
}

TargetSpec ring_target(double radius, double width) {
    TargetSpec t;
    t.family = TargetFamily::Ring;
    t.ring_radius = radius;
    t.ring_width = width;
    return t;
}

TargetSpec checkerboard_target(std::size_t cells, double cell_size) {
    TargetSpec t;
    t.family = TargetFamily::Checkerboard;
    t.checker_cells = cells;
    t.checker_cell_size = cell_size;
    return t;
}

namespace {

void draw_one(const TargetSpec& spec, std::size_t class_id, Rng& rng, std::span<double> out) {
    switch (spec.family) {
        case TargetFamily::GaussianMixture: {
            const auto& comps = spec.classes[class_id];
            const auto& c = comps[rng.below(comps.size())];
            for (std::size_t k = 0; k < spec.dim; ++k) out[k] = c.center[k] + c.sigma * rng.normal();
            break;
        }
        case TargetFamily::Ring: {
            const double theta = 2.0 * std::numbers::pi * rng.uniform();
            double z;
            do {
                z = rng.normal();
            } while (std::abs(z) > 4.0);  // radial noise truncated at 4 sigma
            const double r = spec.ring_radius + spec.ring_width * z;
            out[0] = r * std::cos(theta);
            out[1] = r * std::sin(theta);
            break;
        }
        case TargetFamily::Checkerboard: {
            // cells with (ix + iy) even are occupied
            const std::size_t n = spec.checker_cells;
            const std::size_t occupied = (n * n + 1) / 2;
            const std::size_t pick = rng.below(occupied);
            std::size_t seen = 0, ix = 0, iy = 0;
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = 0; b < n; ++b)
                    if ((a + b) % 2 == 0 && seen++ == pick) ix = a, iy = b;
            const double half = 0.5 * static_cast<double>(n) * spec.checker_cell_size;
            out[0] = (static_cast<double>(ix) + rng.uniform()) * spec.checker_cell_size - half;
            out[1] = (static_cast<double>(iy) + rng.uniform()) * spec.checker_cell_size - half;
            break;
        }
    }
}

}  // namespace

Matrix sample_target(const TargetSpec& spec, std::size_t class_id, std::size_t n, Rng& rng) {
    spec.validate();
    if (n == 0) throw std::invalid_argument("sample_target: n must be positive");
    if (class_id >= spec.n_classes()) throw std::invalid_argument("sample_target: class id out of range");
    Matrix out(n, spec.dim);
    for (std::size_t i = 0; i < n; ++i) draw_one(spec, class_id, rng, out.row(i));
    return out;
}

Matrix sample_unconditional(const TargetSpec& spec, std::size_t n, Rng& rng) {
    spec.validate();
    if (n == 0) throw std::invalid_argument("sample_unconditional: n must be positive");
    Matrix out(n, spec.dim);
    for (std::size_t i = 0; i < n; ++i) draw_one(spec, rng.below(spec.n_classes()), rng, out.row(i));
    return out;
}

}  // namespace drifting
