#include "drifting/metrics.hpp"

#include <limits>
#include <stdexcept>

#include "../numerics/kernel_detail.hpp"
#include "drifting/parallel.hpp"

namespace drifting {

namespace {

// Mean pairwise distance between rows of a and b, rows in parallel with a
// fixed-order reduction over per-row partial sums.
double mean_cross_distance(const Matrix& a, const Matrix& b, bool parallel) {
    const std::size_t n = a.rows(), m = b.rows(), d = a.cols();
    std::vector<double> partial(n, 0.0);
    const long long nn = static_cast<long long>(n);
#pragma omp parallel for schedule(static) num_threads(thread_count()) if (parallel && n * m > 4096)
    for (long long ii = 0; ii < nn; ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        double s = 0.0;
        for (std::size_t j = 0; j < m; ++j) s += detail::l2_row(a.row(i).data(), b.row(j).data(), d);
        partial[i] = s;
    }
    double total = 0.0;
    for (double p : partial) total += p;
    return total / (static_cast<double>(n) * static_cast<double>(m));
}

double energy_distance_impl(const Matrix& a, const Matrix& b, bool parallel) {
    require_valid(a, "energy_distance(a)");
    require_valid(b, "energy_distance(b)");
    if (a.cols() != b.cols()) throw std::invalid_argument("energy_distance: dimension mismatch");
    const double ed = 2.0 * mean_cross_distance(a, b, parallel) - mean_cross_distance(a, a, parallel) -
                      mean_cross_distance(b, b, parallel);
    return std::max(ed, 0.0);
}

}  // namespace

double energy_distance(const Matrix& a, const Matrix& b) { return energy_distance_impl(a, b, true); }

namespace serial {
double energy_distance(const Matrix& a, const Matrix& b) { return energy_distance_impl(a, b, false); }
}  // namespace serial

std::vector<double> mode_coverage(const Matrix& samples, const std::vector<std::vector<double>>& centers,
                                  double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("mode_coverage: radius must be > 0");
    require_valid(samples, "mode_coverage");
    std::vector<double> frac(centers.size(), 0.0);
    if (centers.empty()) return frac;
    for (const auto& c : centers) {
        if (c.size() != samples.cols()) throw std::invalid_argument("mode_coverage: center dimension mismatch");
    }
    for (std::size_t i = 0; i < samples.rows(); ++i) {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < centers.size(); ++k) {
            const double dist = detail::l2_row(samples.row(i).data(), centers[k].data(), samples.cols());
            if (dist < best_d) {
                best_d = dist;
                best = k;
            }
        }
        if (best_d <= radius) frac[best] += 1.0;
    }
    for (double& f : frac) f /= static_cast<double>(samples.rows());
    return frac;
}

std::vector<double> column_means(const Matrix& m) {
    require_valid(m, "column_means");
    std::vector<double> mean(m.cols(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t k = 0; k < m.cols(); ++k) mean[k] += m(i, k);
    for (double& v : mean) v /= static_cast<double>(m.rows());
    return mean;
}

}  // namespace drifting
