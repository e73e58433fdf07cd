#include <doctest.h>

#include <cmath>
#include <string>

#include "drifting/diagnostics.hpp"
#include "support.hpp"

using namespace drifting;

namespace {

Matrix linspace_probes(std::size_t n, double lo, double hi) {
    Matrix p(n, 1);
    for (std::size_t k = 0; k < n; ++k) p(k, 0) = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
    return p;
}

}  // namespace

TEST_SUITE("diagnostics") {

TEST_CASE("relative_error") {
    CHECK(relative_error(1.0, 1.0) == 0.0);
    CHECK(relative_error(2.0, 1.0) == 0.5);
    CHECK(relative_error(1e-9, 0.0) == doctest::Approx(1e-3));
    CHECK(relative_error(0.0, 0.0) == 0.0);
}

TEST_CASE("oracle rejects oversized and degenerate inputs") {
    const Matrix big(200, 1), y(100, 1);
    CHECK_THROWS_AS(oracle_drift(big, y, Matrix(100, 1), DriftSpec{}, 1.0), std::invalid_argument);
    DriftSpec s;
    s.self_mask = {0};
    CHECK_THROWS_AS(oracle_drift(Matrix{{0.0}}, Matrix{{1.0}}, Matrix{{2.0}}, s, 1.0), std::invalid_argument);
}

TEST_CASE("randomized suites pass at small sizes") {
    CHECK(antisymmetry_suite(50, 11).passed());
    CHECK(oracle_suite(20, 12).passed());
    for (const auto& r : gradcheck_suite(3, 13)) CHECK(r.passed());
    CHECK(mmd_suite(10, 14).passed());
    const std::string text = suite_report_text({oracle_suite(2, 1)});
    CHECK(text.find("oracle") != std::string::npos);
}

TEST_CASE("identifiability audit passes for distinct gaussian bases") {
    BasisSpec basis;
    basis.centers = {{-2.0}, {0.0}, {2.0}};
    basis.sigma = 0.5;
    Rng rng(0);
    const AuditReport r = identifiability_audit(basis, 0.5, linspace_probes(32, -3.0, 3.0), 20000, rng);
    CHECK(r.rank == 3);
    CHECK(r.expected_rank == 3);
    CHECK(r.singular_gap > 1.0);
    CHECK(r.recovery_residual < 1e-2);
    CHECK(r.antisymmetry_norm <= 4.0 * r.antisymmetry_std_err);
    const std::string text = audit_report_text(r);
    for (const char* key : {"rank = 3", "expected_rank = 3", "singular_values = ", "recovery_residual = ", "passed = "}) {
        CHECK(text.find(key) != std::string::npos);
    }
}

TEST_CASE("identifiability audit fails for a degenerate basis") {
    BasisSpec basis;
    basis.centers = {{-1.0}, {1.0}, {1.0}};
    basis.sigma = 0.5;
    Rng rng(1);
    const AuditReport r = identifiability_audit(basis, 0.5, linspace_probes(16, -3.0, 3.0), 2000, rng);
    CHECK(r.rank < r.expected_rank);
    CHECK_FALSE(r.passed);
    CHECK(audit_report_text(r).find("passed = false") != std::string::npos);
}

TEST_CASE("identifiability audit preconditions") {
    BasisSpec one;
    one.centers = {{0.0}};
    Rng rng(2);
    CHECK_THROWS_AS(identifiability_audit(one, 0.5, linspace_probes(8, -1.0, 1.0), 100, rng), std::invalid_argument);
    BasisSpec three;
    three.centers = {{-1.0}, {0.0}, {1.0}};
    CHECK_THROWS_AS(identifiability_audit(three, 0.5, linspace_probes(4, -1.0, 1.0), 100, rng), std::invalid_argument);
    CHECK_THROWS_AS(identifiability_audit(three, 0.0, linspace_probes(16, -1.0, 1.0), 100, rng),
                    std::invalid_argument);
}

}
