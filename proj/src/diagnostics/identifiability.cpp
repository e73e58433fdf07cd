#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "drifting/diagnostics.hpp"
#include "drifting/io.hpp"

namespace drifting {

namespace {

// Running sum and sum of squares for a block of Monte-Carlo estimates.
struct Moments {
    std::vector<double> sum, sq;
    explicit Moments(std::size_t n) : sum(n, 0.0), sq(n, 0.0) {}
    void add(std::size_t k, double v) {
        sum[k] += v;
        sq[k] += v * v;
    }
    double mean(std::size_t k, double s) const { return sum[k] / s; }
    // variance of the mean
    double var_mean(std::size_t k, double s) const {
        const double m = sum[k] / s;
        return std::max(0.0, (sq[k] / s - m * m) / (s - 1.0));
    }
};

}  // namespace

AuditReport identifiability_audit(const BasisSpec& basis, double tau, const Matrix& probes, std::size_t mc_samples,
                                  Rng& rng) {
    const std::size_t m = basis.m(), d = basis.dim(), n = probes.rows();
    if (m < 2) throw std::invalid_argument("identifiability_audit: need at least two basis densities");
    for (const auto& c : basis.centers) {
        if (c.size() != d) throw std::invalid_argument("identifiability_audit: ragged centers");
    }
    require_valid(probes, "identifiability_audit(probes)");
    if (probes.cols() != d) throw std::invalid_argument("identifiability_audit: probe dimension mismatch");
    if (n * d < m * m) throw std::invalid_argument("identifiability_audit: need N*d >= m^2 probe coordinates");
    if (mc_samples < 2) throw std::invalid_argument("identifiability_audit: need at least two MC samples");
    if (!(tau > 0.0) || !(basis.sigma > 0.0)) throw std::invalid_argument("identifiability_audit: tau, sigma must be > 0");

    AuditReport r;
    r.m = m;
    r.dim = d;
    r.probes = n;
    r.mc_samples = mc_samples;
    r.tau = tau;
    r.expected_rank = m * (m - 1) / 2;

    // Coefficients of the in-basis distribution used by checks (c) and (d).
    std::vector<double> a(m);
    double a_sum = 0.0;
    for (auto& v : a) a_sum += v = 0.5 + rng.uniform();
    for (auto& v : a) v /= a_sum;

    const std::size_t rows = n * d;
    auto entry = [&](std::size_t i, std::size_t j, std::size_t row) { return (i * m + j) * rows + row; };
    Moments u(m * m * rows);      // U_ij
    Moments anti(m * m * rows);   // U_ij + U_ji, i < j
    Moments mix(rows);            // sum_ij a_i a_j U_ij

    // Common random numbers: sample s uses the same (z+, z-) for every pair.
    const Matrix z_pos = draw_normal(rng, mc_samples, d);
    const Matrix z_neg = draw_normal(rng, mc_samples, d);
    std::vector<double> yp(m * d), yn(m * d), kp(m), kn(m), pair(m * m * d);
    for (std::size_t s = 0; s < mc_samples; ++s) {
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t c = 0; c < d; ++c) {
                yp[i * d + c] = basis.centers[i][c] + basis.sigma * z_pos(s, c);
                yn[i * d + c] = basis.centers[i][c] + basis.sigma * z_neg(s, c);
            }
        }
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t i = 0; i < m; ++i) {
                double dp = 0.0, dn = 0.0;
                for (std::size_t c = 0; c < d; ++c) {
                    dp += (probes(p, c) - yp[i * d + c]) * (probes(p, c) - yp[i * d + c]);
                    dn += (probes(p, c) - yn[i * d + c]) * (probes(p, c) - yn[i * d + c]);
                }
                kp[i] = std::exp(-std::sqrt(dp) / tau);
                kn[i] = std::exp(-std::sqrt(dn) / tau);
            }
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t j = 0; j < m; ++j) {
                    for (std::size_t c = 0; c < d; ++c) {
                        pair[(i * m + j) * d + c] = kp[i] * kn[j] * (yp[i * d + c] - yn[j * d + c]);
                    }
                }
            }
            for (std::size_t c = 0; c < d; ++c) {
                const std::size_t row = p * d + c;
                double v_mix = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    for (std::size_t j = 0; j < m; ++j) {
                        const double k_ij = pair[(i * m + j) * d + c];
                        u.add(entry(i, j, row), k_ij);
                        if (i < j) anti.add(entry(i, j, row), k_ij + pair[(j * m + i) * d + c]);
                        v_mix += a[i] * a[j] * k_ij;
                    }
                }
                mix.add(row, v_mix);
            }
        }
    }
    const double ns = static_cast<double>(mc_samples);

    // (a) antisymmetry, judged on the norm over all i < j entries
    double anti_sq = 0.0, anti_var = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            for (std::size_t row = 0; row < rows; ++row) {
                const std::size_t k = entry(i, j, row);
                const double e = anti.mean(k, ns);
                r.antisymmetry_max_err = std::max(r.antisymmetry_max_err, std::abs(e));
                anti_sq += e * e;
                anti_var += anti.var_mean(k, ns);
            }
        }
    }
    r.antisymmetry_norm = std::sqrt(anti_sq);
    r.antisymmetry_std_err = std::sqrt(anti_var);

    // (b) rank of the stacked U_ij, i < j
    Eigen::MatrixXd stack(rows, r.expected_rank);
    std::size_t col = 0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j, ++col) {
            for (std::size_t row = 0; row < rows; ++row) stack(row, col) = u.mean(entry(i, j, row), ns);
        }
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(stack);
    const Eigen::VectorXd sv = svd.singularValues();
    r.singular_values.assign(sv.data(), sv.data() + sv.size());
    const double threshold = static_cast<double>(std::max(rows, r.expected_rank)) * sv(0) * 1e-8;
    for (double v : r.singular_values) r.rank += v > threshold ? 1 : 0;
    r.singular_gap = sv(sv.size() - 1) / std::max(threshold, 1e-300);

    // (c) equal mixtures give zero drift up to MC noise
    double mix_sq = 0.0, mix_var = 0.0;
    for (std::size_t row = 0; row < rows; ++row) {
        const double e = mix.mean(row, ns);
        mix_sq += e * e;
        mix_var += mix.var_mean(row, ns);
    }
    r.equal_mix_norm = std::sqrt(mix_sq);
    r.equal_mix_std_err = std::sqrt(mix_var);

    // (d) with q = sum a_i phi_i fixed, zero drift pins p: null vector of
    // b -> sum_ij a_i b_j U_ij
    Eigen::MatrixXd sys(rows, m);
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t row = 0; row < rows; ++row) {
            double s = 0.0;
            for (std::size_t i = 0; i < m; ++i) s += a[i] * u.mean(entry(i, j, row), ns);
            sys(row, j) = s;
        }
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd> null_svd(sys, Eigen::ComputeFullV);
    const Eigen::VectorXd b = null_svd.matrixV().col(m - 1);
    const double b_sum = b.sum();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double bi = b_sum != 0.0 ? b(i) / b_sum : 0.0;
        num += (bi - a[i]) * (bi - a[i]);
        den += a[i] * a[i];
    }
    r.recovery_residual = std::sqrt(num / den);

    r.passed = r.rank == r.expected_rank && r.antisymmetry_norm <= 3.0 * r.antisymmetry_std_err &&
               r.equal_mix_norm <= 3.0 * r.equal_mix_std_err && r.recovery_residual < 1e-2;
    return r;
}

std::string audit_report_text(const AuditReport& r) {
    std::ostringstream out;
    out << "m = " << r.m << "\n"
        << "dim = " << r.dim << "\n"
        << "probes = " << r.probes << "\n"
        << "mc_samples = " << r.mc_samples << "\n"
        << "tau = " << format_double(r.tau) << "\n"
        << "antisymmetry_max_err = " << format_double(r.antisymmetry_max_err) << "\n"
        << "antisymmetry_norm = " << format_double(r.antisymmetry_norm) << "\n"
        << "antisymmetry_std_err = " << format_double(r.antisymmetry_std_err) << "\n"
        << "rank = " << r.rank << "\n"
        << "expected_rank = " << r.expected_rank << "\n"
        << "singular_gap = " << format_double(r.singular_gap) << "\n"
        << "singular_values =";
    for (std::size_t k = 0; k < r.singular_values.size(); ++k) {
        out << (k ? "," : " ") << format_double(r.singular_values[k]);
    }
    out << "\n"
        << "equal_mix_norm = " << format_double(r.equal_mix_norm) << "\n"
        << "equal_mix_std_err = " << format_double(r.equal_mix_std_err) << "\n"
        << "recovery_residual = " << format_double(r.recovery_residual) << "\n"
        << "passed = " << (r.passed ? "true" : "false") << "\n";
    return out.str();
}

}  // namespace drifting
