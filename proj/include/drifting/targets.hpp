#pragma once

#include <string_view>
#include <vector>

#include "drifting/matrix.hpp"
#include "drifting/rng.hpp"

namespace drifting {

enum class TargetFamily { GaussianMixture, Ring, Checkerboard };

TargetFamily parse_target_family(std::string_view s);
std::string_view to_string(TargetFamily f);

struct MixtureComponent {
    std::vector<double> center;
    double sigma = 0.3;
};

// Class-conditional toy density. Gaussian mixtures hold equal-weight
// isotropic components per class; ring and checkerboard are single-class 2D.
struct TargetSpec {
    TargetFamily family = TargetFamily::GaussianMixture;
    std::size_t dim = 2;
    std::vector<std::vector<MixtureComponent>> classes;
    double ring_radius = 2.0;
    double ring_width = 0.1;
    std::size_t checker_cells = 4;
    double checker_cell_size = 1.0;

    std::size_t n_classes() const;
    // Mixture component centers of every class, in class order; empty for
    // ring and checkerboard.
    std::vector<std::vector<double>> mode_centers() const;
    void validate() const;
};

// Centers (+-2, 0), sigma 0.3, one class.
TargetSpec bimodal_target();
TargetSpec ring_target(double radius = 2.0, double width = 0.1);
TargetSpec checkerboard_target(std::size_t cells = 4, double cell_size = 1.0);

Matrix sample_target(const TargetSpec& spec, std::size_t class_id, std::size_t n, Rng& rng);
// Equal-weight mixture over all classes.
Matrix sample_unconditional(const TargetSpec& spec, std::size_t n, Rng& rng);

}  // namespace drifting
