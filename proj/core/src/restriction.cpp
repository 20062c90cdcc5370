#include "vulnet/restriction.hpp"

#include "vulnet/detail/csv.hpp"
#include "vulnet/errors.hpp"

#include <algorithm>
#include <unordered_set>

namespace vulnet {

namespace {
constexpr double kEpsilonRenorm = 1e-9;
} // namespace

std::string RestrictionSpec::to_text() const {
    std::string out = "target=" + target_country + " source=" + source_country + " sectors=";
    if (all_sectors()) {
        out += "ALL";
    } else {
        for (std::size_t i = 0; i < restricted_sectors.size(); ++i) {
            if (i > 0) out += ',';
            out += restricted_sectors[i];
        }
    }
    return out;
}

RestrictionSpec parse_restriction_spec(const std::string& text) {
    RestrictionSpec spec;
    bool have_target = false;
    bool have_source = false;
    bool have_sectors = false;
    for (auto field : detail::split_fields(text, ' ')) {
        if (field.empty()) continue;
        auto eq = field.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError("malformed restriction field: '" + std::string(field) + "'");
        }
        auto key = field.substr(0, eq);
        auto value = field.substr(eq + 1);
        if (key == "target") {
            spec.target_country = std::string(value);
            have_target = !value.empty();
        } else if (key == "source") {
            spec.source_country = std::string(value);
            have_source = !value.empty();
        } else if (key == "sectors") {
            if (value.empty()) {
                throw ParseError("restriction needs at least one sector or ALL");
            }
            if (value != "ALL") {
                for (auto code : detail::split_fields(value, ',')) {
                    if (code.empty()) {
                        throw ParseError("empty sector code in restriction: '" + text + "'");
                    }
                    spec.restricted_sectors.emplace_back(code);
                }
            }
            have_sectors = true;
        } else {
            throw ParseError("unknown restriction field '" + std::string(key) + "'");
        }
    }
    if (!have_target || !have_source || !have_sectors) {
        throw ParseError("restriction needs target=, source= and sectors=: '" + text + "'");
    }
    return spec;
}

SelectorSet make_selectors(const RestrictionSpec& spec, const CountrySectorIndex& index) {
    if (spec.target_country == spec.source_country) {
        throw SpecError("restriction target and source must differ (both '" +
                        spec.target_country + "')");
    }
    auto target = index.find_country(spec.target_country);
    if (!target) throw SchemaError("unknown target country '" + spec.target_country + "'");
    auto source = index.find_country(spec.source_country);
    if (!source) throw SchemaError("unknown source country '" + spec.source_country + "'");

    std::vector<std::size_t> sector_positions;
    if (spec.all_sectors()) {
        sector_positions.resize(index.sector_count());
        for (std::size_t s = 0; s < index.sector_count(); ++s) sector_positions[s] = s;
    } else {
        std::unordered_set<std::size_t> seen;
        for (const auto& code : spec.restricted_sectors) {
            auto pos = index.find_sector(code);
            if (!pos) throw SchemaError("unknown sector '" + code + "'");
            if (seen.insert(*pos).second) sector_positions.push_back(*pos);
        }
        std::sort(sector_positions.begin(), sector_positions.end());
    }

    const auto n = static_cast<Eigen::Index>(index.size());
    SelectorSet sel;
    sel.q = Eigen::VectorXd::Zero(n);
    sel.r = Eigen::VectorXd::Zero(n);
    for (std::size_t s = 0; s < index.sector_count(); ++s) {
        auto row = index.node(*target, s);
        sel.q[static_cast<Eigen::Index>(row)] = 1.0;
        sel.target_rows.push_back(static_cast<std::uint32_t>(row));
    }
    for (auto s : sector_positions) {
        auto col = index.node(*source, s);
        sel.r[static_cast<Eigen::Index>(col)] = 1.0;
        sel.restricted_columns.push_back(static_cast<std::uint32_t>(col));
    }
    sel.mu = sel.q;
    sel.nu = sel.r;
    return sel;
}

namespace {

/// Ascending-row sum of the target-row entries of one column.
double column_target_share(const Eigen::SparseMatrix<double>& shares, std::uint32_t column,
                           const Eigen::VectorXd& q) {
    double psi = 0.0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(shares, column); it; ++it) {
        if (q[it.row()] != 0.0) psi += it.value();
    }
    return psi;
}

} // namespace

Eigen::VectorXd target_shares(const AllocationMatrix& A, const SelectorSet& sel) {
    Eigen::VectorXd psi = Eigen::VectorXd::Zero(A.shares.cols());
    for (auto column : sel.restricted_columns) {
        psi[column] = column_target_share(A.shares, column, sel.q);
    }
    return psi;
}

RestrictedAllocation apply_restriction(const AllocationMatrix& A, const SelectorSet& sel) {
    RestrictedAllocation out;
    out.benchmark = &A;
    out.psi = Eigen::VectorXd::Zero(A.shares.cols());
    out.normalizers = Eigen::VectorXd::Ones(A.shares.cols());

    for (auto column : sel.restricted_columns) {
        if (!A.active[column]) {
            ++out.skipped_inactive; // nothing to redirect
            continue;
        }
        const double psi = column_target_share(A.shares, column, sel.q);
        if (!(psi < 1.0 - kEpsilonRenorm)) {
            throw TotalDependenceError(
                "supplier column " + std::to_string(column) +
                    " sells essentially all of its within-network output to the target; "
                    "renormalization is undefined",
                column, psi);
        }
        const double normalizer = 1.0 / (1.0 - psi);
        out.psi[column] = psi;
        out.normalizers[column] = normalizer;

        std::vector<std::pair<std::uint32_t, double>> rewritten;
        for (Eigen::SparseMatrix<double>::InnerIterator it(A.shares, column); it; ++it) {
            if (sel.q[it.row()] != 0.0) continue; // deliveries to the target stop
            rewritten.emplace_back(static_cast<std::uint32_t>(it.row()),
                                   it.value() * normalizer);
        }
        out.restricted_columns.push_back(column);
        out.columns.push_back(std::move(rewritten));
    }
    return out;
}

AllocationMatrix RestrictedAllocation::materialize() const {
    const auto& A = *benchmark;
    AllocationMatrix out;
    out.active = A.active;

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(A.shares.nonZeros()));
    std::size_t next_rewrite = 0;
    for (Eigen::Index j = 0; j < A.shares.outerSize(); ++j) {
        if (next_rewrite < restricted_columns.size() &&
            static_cast<Eigen::Index>(restricted_columns[next_rewrite]) == j) {
            for (const auto& [row, value] : columns[next_rewrite]) {
                triplets.emplace_back(static_cast<Eigen::Index>(row), j, value);
            }
            ++next_rewrite;
            continue;
        }
        for (Eigen::SparseMatrix<double>::InnerIterator it(A.shares, j); it; ++it) {
            triplets.emplace_back(it.row(), j, it.value());
        }
    }
    out.shares.resize(A.shares.rows(), A.shares.cols());
    out.shares.setFromTriplets(triplets.begin(), triplets.end());
    out.shares.makeCompressed();
    return out;
}

PropagationKernel restricted_kernel(const RestrictedAllocation& A_circ,
                                    const LeakageRates& beta) {
    AllocationMatrix materialized = A_circ.materialize();
    PropagationKernel kernel = build_kernel(materialized, beta);
    // Column sums are preserved by renormalization, so this is the cheap
    // bound path except when the benchmark itself needed the spectral
    // fallback; then the restricted kernel earns its own estimate.
    validate_kernel(kernel);
    return kernel;
}

} // namespace vulnet
