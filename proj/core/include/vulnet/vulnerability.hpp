#pragma once

#include "vulnet/flow.hpp"
#include "vulnet/kernel.hpp"

#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace vulnet {

/// Change in the target's long-run exposure per origin, plus the scalar
/// index derived from it. gamma_normalized is assigned during batch
/// post-processing; NaN until then.
struct PropagationDelta {
    Eigen::VectorXd delta_y;
    double gamma = std::numeric_limits<double>::quiet_NaN();
    double gamma_normalized = std::numeric_limits<double>::quiet_NaN();
};

/// DK = K_circ - K; exact zeros are pruned, so the stored pattern covers
/// only columns the restriction actually changed.
Eigen::SparseMatrix<double> kernel_delta(const PropagationKernel& K,
                                         const PropagationKernel& K_circ);

/// Dense truncated-series difference Phi_T = sum_{t<T} K^t - sum_{t<T}
/// K_circ^t. Oracle only; inherits the N <= 512 guard.
Eigen::MatrixXd phi_finite(const PropagationKernel& K, const PropagationKernel& K_circ,
                           std::size_t T);

/// delta_y = mu^T (I-K)^{-1} - mu^T (I-K_circ)^{-1} via two row solves.
/// Pass the benchmark solve through `benchmark_exposure` when it is already
/// known (one benchmark solve serves a whole batch); it also warm-starts
/// the counterfactual solve. Identical kernels short-circuit to an exact
/// zero vector, so a null restriction never carries solver noise.
PropagationDelta exposure_delta(const PropagationKernel& K, const PropagationKernel& K_circ,
                                const Eigen::VectorXd& mu,
                                const Eigen::VectorXd* benchmark_exposure = nullptr);

/// gamma = sum over nu-selected origins of delta_y_l z_l, accumulated in
/// ascending node order. Stores the value in delta.gamma and returns it.
double gamma_index(PropagationDelta& delta, const SizeWeights& Z, const Eigen::VectorXd& nu);

/// Divides by the class maximum so the best score is exactly 1.
/// max <= 0 raises DegenerateClassError.
std::vector<double> normalize_scores(const std::vector<double>& scores);

struct ConcentrationEntry {
    std::string country;
    std::string sector; ///< "ALL" for country-level scenarios
    double score = 0.0;
};

/// Descending score order; equal scores fall back to (country, sector)
/// lexicographic order so reports are deterministic.
struct ConcentrationStats {
    std::vector<ConcentrationEntry> sorted_scores;
    /// (k, cumulative top-k share of total) at k in {1,5,10,20,100}
    /// truncated to the class size, closing with (retained count, 1).
    std::vector<std::pair<std::size_t, double>> topk_shares;
    /// Negatives inside (-1e-9 * max, 0) zeroed before computing shares.
    std::size_t clamped_tiny = 0;
    /// Larger negatives: kept in sorted_scores untouched but left out of
    /// both numerators and the denominator.
    std::size_t excluded_negative = 0;
};

/// All-zero retained total raises DegenerateClassError.
ConcentrationStats concentration(std::vector<ConcentrationEntry> entries);

} // namespace vulnet
