#pragma once

#include <vector>

#include "drifting/matrix.hpp"

namespace drifting {

// V-statistic energy distance 2E|a-b| - E|a-a'| - E|b-b'|.
double energy_distance(const Matrix& a, const Matrix& b);

// Fraction of samples whose nearest center is k and lies within radius.
std::vector<double> mode_coverage(const Matrix& samples, const std::vector<std::vector<double>>& centers,
                                  double radius);

std::vector<double> column_means(const Matrix& m);

namespace serial {
double energy_distance(const Matrix& a, const Matrix& b);
}

}  // namespace drifting
