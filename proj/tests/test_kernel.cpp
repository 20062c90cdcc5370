#include "vulnet/errors.hpp"
#include "vulnet/kernel.hpp"

#include <doctest.h>

#include "support.hpp"

using namespace vulnet;

namespace {

// A = [[0,1],[1,0]], beta = (0.6, 0.5) gives K = [[0,0.5],[0.4,0]]: both
// products are exact in binary floating point.
PropagationKernel cross_kernel() {
    Eigen::MatrixXd a(2, 2);
    a << 0.0, 1.0, 1.0, 0.0;
    auto kernel = build_kernel(support::allocation_from_dense(a), support::leakage_from({0.6, 0.5}));
    validate_kernel(kernel);
    return kernel;
}

} // namespace

TEST_CASE("kernel scales allocation columns by retention") {
    auto kernel = cross_kernel();
    Eigen::MatrixXd k = Eigen::MatrixXd(kernel.K);
    CHECK(k(1, 0) == 0.4);
    CHECK(k(0, 1) == 0.5);
    CHECK(k(0, 0) == 0.0);
    CHECK(kernel.column_sums[0] == 0.4);
    CHECK(kernel.column_sums[1] == 0.5);
    CHECK(kernel.colsum_bound == 0.5);
    CHECK(kernel.certified());
    CHECK_FALSE(kernel.certificate.spectral_estimate.has_value());
}

TEST_CASE("kernel construction validates dimensions and rates") {
    Eigen::MatrixXd a(2, 2);
    a << 0.0, 1.0, 1.0, 0.0;
    auto alloc = support::allocation_from_dense(a);
    CHECK_THROWS_AS(build_kernel(alloc, support::leakage_from({0.5})), ArgumentError);
    CHECK_THROWS_AS(build_kernel(alloc, support::leakage_from({0.5, -0.1})), ArgumentError);
    CHECK_THROWS_AS(build_kernel(alloc, support::leakage_from({0.5, 1.5})), ArgumentError);
}

TEST_CASE("row solve matches the hand-solved resolvent") {
    auto kernel = cross_kernel();
    Eigen::VectorXd m(2);
    m << 1.0, 0.0;
    // (I-K)^T v = m with K = [[0,0.5],[0.4,0]] solves to (1.25, 0.625).
    Eigen::VectorXd v = leontief_row_solve(kernel, m);
    CHECK(v[0] == doctest::Approx(1.25).epsilon(1e-12));
    CHECK(v[1] == doctest::Approx(0.625).epsilon(1e-12));

    // Residual contract, checked independently.
    Eigen::MatrixXd system =
        (Eigen::MatrixXd::Identity(2, 2) - Eigen::MatrixXd(kernel.K)).transpose();
    CHECK((system * v - m).cwiseAbs().maxCoeff() <= 1e-9 * (1.0 + 1.0));
}

TEST_CASE("row solve validates inputs and kernel state") {
    auto kernel = cross_kernel();
    Eigen::VectorXd short_m(1);
    short_m << 1.0;
    CHECK_THROWS_AS(leontief_row_solve(kernel, short_m), ArgumentError);

    Eigen::VectorXd m(2);
    m << 1.0, 0.0;
    Eigen::VectorXd bad_guess(1);
    bad_guess << 0.0;
    SolveOptions options;
    options.initial_guess = &bad_guess;
    CHECK_THROWS_AS(leontief_row_solve(kernel, m, options), ArgumentError);

    Eigen::MatrixXd a(2, 2);
    a << 0.0, 1.0, 1.0, 0.0;
    auto uncertified =
        build_kernel(support::allocation_from_dense(a), support::leakage_from({0.6, 0.5}));
    CHECK_THROWS_AS(leontief_row_solve(uncertified, m), StabilityError);
}

TEST_CASE("warm start converges to the same solution") {
    auto kernel = cross_kernel();
    Eigen::VectorXd m(2);
    m << 2.0, 3.0;
    Eigen::VectorXd cold = leontief_row_solve(kernel, m);
    Eigen::VectorXd guess = cold;
    guess[0] += 1e-3; // small perturbation off the solution
    SolveOptions options;
    options.initial_guess = &guess;
    Eigen::VectorXd warm = leontief_row_solve(kernel, m, options);
    CHECK(warm[0] == doctest::Approx(cold[0]).epsilon(1e-10));
    CHECK(warm[1] == doctest::Approx(cold[1]).epsilon(1e-10));
}

TEST_CASE("zero kernel certifies with bound zero") {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 3);
    auto kernel =
        build_kernel(support::allocation_from_dense(a), support::leakage_from({1.0, 1.0, 1.0}));
    auto report = validate_kernel(kernel);
    CHECK(report.certified);
    CHECK(report.colsum_bound == 0.0);
    CHECK(report.saturated_columns.empty());

    Eigen::VectorXd m(3);
    m << 1.0, 2.0, 3.0;
    CHECK(support::exact_equal(leontief_row_solve(kernel, m), m));
}

TEST_CASE("zero leakage fails certification and names saturated columns") {
    // beta = 0 keeps columns at sum 1: the bound cannot certify and the
    // power iteration settles on growth ratio 1.
    Eigen::MatrixXd a(2, 2);
    a << 0.0, 1.0, 1.0, 0.0;
    auto kernel =
        build_kernel(support::allocation_from_dense(a), support::leakage_from({0.0, 0.0}));
    try {
        validate_kernel(kernel);
        FAIL("expected StabilityError");
    } catch (const StabilityError& e) {
        CHECK(e.offending_columns == std::vector<std::uint32_t>{0, 1});
    }
    CHECK_FALSE(kernel.certified());
    CHECK(kernel.certificate.colsum_bound == 1.0);
    CHECK(kernel.certificate.spectral_estimate.has_value());
}

TEST_CASE("stability report text round trips") {
    StabilityReport report;
    report.colsum_bound = 0.9375;
    report.spectral_estimate = 0.875;
    report.power_iterations = 42;
    report.certified = true;
    report.saturated_columns = {3, 17};

    auto parsed = parse_stability_report(report.to_text());
    CHECK(parsed.colsum_bound == report.colsum_bound);
    CHECK(parsed.spectral_estimate == report.spectral_estimate);
    CHECK(parsed.power_iterations == report.power_iterations);
    CHECK(parsed.certified == report.certified);
    CHECK(parsed.saturated_columns == report.saturated_columns);

    report.spectral_estimate.reset();
    report.saturated_columns.clear();
    report.certified = false;
    auto sparse = parse_stability_report(report.to_text());
    CHECK_FALSE(sparse.spectral_estimate.has_value());
    CHECK(sparse.saturated_columns.empty());
    CHECK_FALSE(sparse.certified);
}

TEST_CASE("truncated series accumulates kernel powers") {
    auto kernel = cross_kernel();
    Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(2, 2);
    CHECK(support::exact_equal(neumann_cumulative(kernel, 1), identity));
    CHECK(support::exact_equal(neumann_cumulative(kernel, 2),
                               Eigen::MatrixXd(identity + Eigen::MatrixXd(kernel.K))));
    CHECK_THROWS_AS(neumann_cumulative(kernel, 0), ArgumentError);

    PropagationKernel big;
    big.K.resize(600, 600);
    CHECK_THROWS_AS(neumann_cumulative(big, 2), SizeGuardError);
}
