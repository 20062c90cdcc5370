#pragma once

#include "vulnet/flow.hpp"
#include "vulnet/index.hpp"
#include "vulnet/kernel.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace vulnet {

/// One counterfactual: the source country stops supplying the listed
/// sectors' output to every sector of the target country.
struct RestrictionSpec {
    std::string target_country;
    std::string source_country;
    /// Sector codes of the source country; empty means all sectors.
    std::vector<std::string> restricted_sectors;

    bool all_sectors() const { return restricted_sectors.empty(); }

    /// `target=<code> source=<code> sectors=<comma list|ALL>`
    std::string to_text() const;
};

RestrictionSpec parse_restriction_spec(const std::string& text);

/// 0/1 selectors derived from a RestrictionSpec: q marks target-country
/// rows, r marks restricted supplier columns; mu and nu are the matching
/// aggregation selectors. q and r are disjoint since target != source.
struct SelectorSet {
    Eigen::VectorXd q;
    Eigen::VectorXd r;
    Eigen::VectorXd mu;
    Eigen::VectorXd nu;
    /// Node ids with r = 1, ascending.
    std::vector<std::uint32_t> restricted_columns;
    /// Node ids with q = 1, ascending.
    std::vector<std::uint32_t> target_rows;
};

/// Validates the spec against the index. target == source raises
/// SpecError; unknown codes raise SchemaError; an explicit empty sector
/// list is rejected upstream by the parser.
SelectorSet make_selectors(const RestrictionSpec& spec, const CountrySectorIndex& index);

/// psi_l = sum over target rows of a_il for restricted columns, 0
/// elsewhere.
Eigen::VectorXd target_shares(const AllocationMatrix& A, const SelectorSet& sel);

/// Renormalized restricted allocation. Only restricted columns are stored
/// as a delta; materialize() rebuilds the full matrix with unrestricted
/// columns bitwise identical to the benchmark's.
struct RestrictedAllocation {
    const AllocationMatrix* benchmark = nullptr;
    Eigen::VectorXd psi;
    Eigen::VectorXd normalizers;
    std::vector<std::uint32_t> restricted_columns;
    /// Rewritten columns, same order as restricted_columns; each holds
    /// (row, value) pairs with target rows already removed.
    std::vector<std::vector<std::pair<std::uint32_t, double>>> columns;
    /// Restricted columns skipped because the supplier is inactive.
    std::size_t skipped_inactive = 0;

    AllocationMatrix materialize() const;
};

/// Applies the reallocative restriction: target rows of restricted active
/// columns drop to zero and the remaining entries scale by 1/(1-psi_l).
/// Columns with psi_l > 1 - 1e-9 have no meaningful renormalization and
/// raise TotalDependenceError naming the column. Inactive restricted
/// columns are skipped and counted.
RestrictedAllocation apply_restriction(const AllocationMatrix& A, const SelectorSet& sel);

/// K_circ = A_circ(I-beta) with the benchmark leakage. Column sums match the
/// benchmark's on restricted columns by construction, so the certificate
/// transfers whenever the column-sum bound already certifies; the rare
/// saturated-bound case re-runs the spectral check.
PropagationKernel restricted_kernel(const RestrictedAllocation& A_circ,
                                    const LeakageRates& beta);

} // namespace vulnet
