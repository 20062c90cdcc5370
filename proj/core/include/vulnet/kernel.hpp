#pragma once

#include "vulnet/flow.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace vulnet {

/// Outcome of the stability check on a propagation kernel. `certified`
/// means downstream solves may rely on convergence: either every column
/// sum is strictly below one, or a spectral-radius estimate is.
struct StabilityReport {
    double colsum_bound = 0.0;
    /// Power-iteration estimate of the spectral radius; present only when
    /// the column-sum bound alone does not certify.
    std::optional<double> spectral_estimate;
    std::size_t power_iterations = 0;
    bool certified = false;
    /// Columns whose sums reach 1 (only relevant when certification
    /// needed the spectral fallback or failed).
    std::vector<std::uint32_t> saturated_columns;

    std::string to_text() const;
};

StabilityReport parse_stability_report(const std::string& text);

/// One-step transmission operator K = A(I-beta): column j of A scaled by
/// the retention 1-beta_j. Immutable after certification; concurrent
/// row solves against one kernel are safe.
struct PropagationKernel {
    Eigen::SparseMatrix<double> K;
    Eigen::VectorXd beta;
    /// Cached exact column sums of K, accumulated in ascending row order.
    Eigen::VectorXd column_sums;
    /// max_j of column_sums; < 1 certifies stability by itself.
    double colsum_bound = 0.0;
    StabilityReport certificate;

    std::size_t size() const { return static_cast<std::size_t>(K.cols()); }
    bool certified() const { return certificate.certified; }
};

/// K = A(I-beta), columnwise scaling. Dimension mismatch raises
/// ArgumentError. The returned kernel is uncertified; run validate_kernel.
PropagationKernel build_kernel(const AllocationMatrix& A, const LeakageRates& beta);

/// Certifies stability. The column-sum bound decides when it is < 1;
/// otherwise a power-iteration estimate of the spectral radius runs
/// (1-norm growth ratio averaged over the last 10 iterations, tolerance
/// 1e-10, cap 10,000 iterations) and certifies iff the estimate is below
/// 1 - 1e-8. Stamps the certificate on the kernel and returns a copy.
/// Certification failure raises StabilityError naming the columns whose
/// sums reach 1.
StabilityReport validate_kernel(PropagationKernel& kernel);

struct SolveOptions {
    /// Starting iterate for the iterative path; defaults to m. A good
    /// guess (the benchmark solution) cuts iterations roughly in half.
    const Eigen::VectorXd* initial_guess = nullptr;
    /// Internal residual target, scaled by (1 + max|m|). The external
    /// contract of 1e-9 is always enforced on exit.
    double residual_tolerance = 1e-12;
};

/// v with v^T = m^T (I-K)^{-1}, computed by solving the transposed system
/// (I-K)^T v = m; the inverse is never formed. Uses damped-free fixed
/// point iteration v <- m + K^T v while the certificate predicts it is
/// cheaper than a dense factorization, otherwise falls back to a dense
/// LU solve. Guarantees ||(I-K)^T v - m||_inf <= 1e-9 (1 + ||m||_inf) or
/// raises SolveError. Refuses uncertified kernels (StabilityError).
Eigen::VectorXd leontief_row_solve(const PropagationKernel& kernel, const Eigen::VectorXd& m,
                                   const SolveOptions& options = {});

/// Dense truncated series sum_{t<T} K^t by iterated accumulation; T = 1
/// gives the identity. Oracle for tests, guarded to N <= 512
/// (SizeGuardError beyond).
Eigen::MatrixXd neumann_cumulative(const PropagationKernel& kernel, std::size_t T);

} // namespace vulnet
