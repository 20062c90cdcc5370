#include "vulnet/vulnerability.hpp"

#include "vulnet/errors.hpp"

#include <algorithm>
#include <cstring>

namespace vulnet {

namespace {

bool same_matrix(const Eigen::SparseMatrix<double>& a, const Eigen::SparseMatrix<double>& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols() || a.nonZeros() != b.nonZeros()) {
        return false;
    }
    const auto nnz = static_cast<std::size_t>(a.nonZeros());
    const auto outer = static_cast<std::size_t>(a.outerSize() + 1);
    return std::memcmp(a.outerIndexPtr(), b.outerIndexPtr(),
                       outer * sizeof(*a.outerIndexPtr())) == 0 &&
           std::memcmp(a.innerIndexPtr(), b.innerIndexPtr(),
                       nnz * sizeof(*a.innerIndexPtr())) == 0 &&
           std::memcmp(a.valuePtr(), b.valuePtr(), nnz * sizeof(double)) == 0;
}

} // namespace

Eigen::SparseMatrix<double> kernel_delta(const PropagationKernel& K,
                                         const PropagationKernel& K_circ) {
    if (K.K.rows() != K_circ.K.rows() || K.K.cols() != K_circ.K.cols()) {
        throw ArgumentError("kernel dimensions differ");
    }
    Eigen::SparseMatrix<double> delta = K_circ.K - K.K;
    // Unchanged columns cancel exactly; drop their slots so the stored
    // pattern reflects the restriction's locality.
    delta.prune([](const Eigen::Index&, const Eigen::Index&, const double& v) {
        return v != 0.0;
    });
    return delta;
}

Eigen::MatrixXd phi_finite(const PropagationKernel& K, const PropagationKernel& K_circ,
                           std::size_t T) {
    return neumann_cumulative(K, T) - neumann_cumulative(K_circ, T);
}

PropagationDelta exposure_delta(const PropagationKernel& K, const PropagationKernel& K_circ,
                                const Eigen::VectorXd& mu,
                                const Eigen::VectorXd* benchmark_exposure) {
    PropagationDelta out;
    Eigen::VectorXd storage;
    const Eigen::VectorXd* y = benchmark_exposure;
    if (!y) {
        storage = leontief_row_solve(K, mu);
        y = &storage;
    }
    if (same_matrix(K.K, K_circ.K)) {
        // The restriction changed nothing (no flows to the target): the
        // difference is exactly zero, not two solves' worth of noise.
        out.delta_y = Eigen::VectorXd::Zero(mu.size());
        return out;
    }
    SolveOptions options;
    options.initial_guess = y; // counterfactual solution is nearby
    Eigen::VectorXd y_circ = leontief_row_solve(K_circ, mu, options);
    out.delta_y = *y - y_circ;
    return out;
}

double gamma_index(PropagationDelta& delta, const SizeWeights& Z, const Eigen::VectorXd& nu) {
    if (delta.delta_y.size() != Z.z.size() || nu.size() != Z.z.size()) {
        throw ArgumentError("vulnerability aggregation lengths do not match");
    }
    double g = 0.0;
    for (Eigen::Index l = 0; l < nu.size(); ++l) {
        if (nu[l] != 0.0) g += delta.delta_y[l] * Z.z[l];
    }
    delta.gamma = g;
    return g;
}

std::vector<double> normalize_scores(const std::vector<double>& scores) {
    if (scores.empty()) {
        throw DegenerateClassError("cannot normalize an empty score list");
    }
    const double max = *std::max_element(scores.begin(), scores.end());
    if (!(max > 0.0)) {
        throw DegenerateClassError("class maximum is not positive; normalization undefined");
    }
    std::vector<double> out(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) out[i] = scores[i] / max;
    return out;
}

ConcentrationStats concentration(std::vector<ConcentrationEntry> entries) {
    if (entries.empty()) {
        throw DegenerateClassError("no scores to concentrate");
    }
    ConcentrationStats stats;

    double max = entries.front().score;
    for (const auto& e : entries) max = std::max(max, e.score);
    const double clamp_floor = max > 0.0 ? -1e-9 * max : 0.0;

    for (auto& e : entries) {
        if (e.score < 0.0 && e.score > clamp_floor) {
            e.score = 0.0;
            ++stats.clamped_tiny;
        }
    }

    std::sort(entries.begin(), entries.end(),
              [](const ConcentrationEntry& a, const ConcentrationEntry& b) {
                  if (a.score != b.score) return a.score > b.score;
                  if (a.country != b.country) return a.country < b.country;
                  return a.sector < b.sector;
              });

    std::size_t retained = 0;
    double total = 0.0;
    for (const auto& e : entries) {
        if (e.score < 0.0) {
            ++stats.excluded_negative;
        } else {
            ++retained;
            total += e.score;
        }
    }
    if (!(total > 0.0)) {
        throw DegenerateClassError("retained scores sum to zero; shares undefined");
    }

    static constexpr std::size_t kGrid[] = {1, 5, 10, 20, 100};
    double cumulative = 0.0;
    std::size_t next_grid = 0;
    for (std::size_t k = 1; k <= retained; ++k) {
        cumulative += entries[k - 1].score; // negatives sort last, never enter
        while (next_grid < std::size(kGrid) && kGrid[next_grid] == k) {
            stats.topk_shares.emplace_back(k, cumulative / total);
            ++next_grid;
        }
    }
    if (stats.topk_shares.empty() || stats.topk_shares.back().first != retained) {
        stats.topk_shares.emplace_back(retained, total / total);
    }
    stats.sorted_scores = std::move(entries);
    return stats;
}

} // namespace vulnet
