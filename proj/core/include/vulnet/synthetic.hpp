#pragma once

#include "vulnet/flow.hpp"
#include "vulnet/ingest.hpp"

#include <cstdint>

namespace vulnet {

/// Knobs for the synthetic economy generator. Defaults give sparse tables
/// whose sectors all keep a real final-use share.
struct SyntheticParams {
    std::uint64_t seed = 1;
    std::size_t countries = 0;
    std::size_t sectors = 0;
    /// Expected fraction of nonzero cells per column; every column is
    /// guaranteed at least one buyer regardless.
    double density = 0.02;
    /// Lower bound for the drawn leakage rates. Rates are uniform on
    /// [min_leakage, min(0.95, min_leakage + 0.45)].
    double min_leakage = 0.05;
};

/// A generated economy together with the ground truth the generator knows
/// by construction: intermediate output sizes, allocation column sums and
/// leakage rates. Final use is set to z * beta / (1 - beta) exactly, so a
/// calibration run over the table must reproduce `beta`.
struct SyntheticEconomy {
    FlowTable table;
    Eigen::VectorXd z;
    Eigen::VectorXd allocation_colsums;
    Eigen::VectorXd beta;

    FixtureGroundTruth sidecar() const { return {z, allocation_colsums, beta}; }
};

/// Deterministic for a given parameter set: the stream of random draws is
/// fixed (column-major over cells, then one draw per leakage rate) and the
/// generator maps raw 64-bit words to reals itself, so fixtures are
/// identical across standard library implementations.
SyntheticEconomy generate_economy(const SyntheticParams& params);

} // namespace vulnet
