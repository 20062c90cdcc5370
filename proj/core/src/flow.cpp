#include "vulnet/flow.hpp"

#include "vulnet/errors.hpp"

#include <algorithm>

namespace vulnet {

FlowTable::FlowTable(CountrySectorIndex index, std::vector<FlowRecord> records,
                     Eigen::VectorXd final_use, TableMetadata metadata)
    : index_(std::move(index)), records_(std::move(records)),
      final_use_(std::move(final_use)), metadata_(std::move(metadata)) {
    const auto n = static_cast<Eigen::Index>(index_.size());
    if (final_use_.size() == 0) {
        final_use_ = Eigen::VectorXd::Zero(n);
    }
    if (final_use_.size() != n) {
        throw ArgumentError("final-use vector length does not match index size");
    }
    for (const auto& rec : records_) {
        if (rec.supplier >= index_.size() || rec.user >= index_.size()) {
            throw ArgumentError("flow record node id out of range");
        }
        if (!(rec.value >= 0.0) || !std::isfinite(rec.value)) {
            throw ArgumentError("flow record value must be finite and nonnegative");
        }
    }
    for (Eigen::Index j = 0; j < final_use_.size(); ++j) {
        if (!(final_use_[j] >= 0.0) || !std::isfinite(final_use_[j])) {
            throw ArgumentError("final-use value must be finite and nonnegative");
        }
    }
}

std::size_t AllocationMatrix::active_count() const {
    return static_cast<std::size_t>(std::count(active.begin(), active.end(), std::uint8_t{1}));
}

FlowMatrix build_flow_matrix(const FlowTable& table, const CountrySectorIndex& index) {
    const auto n = static_cast<Eigen::Index>(index.size());
    const bool same_index = table.index() == index;

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(table.records().size());
    for (const auto& rec : table.records()) {
        std::size_t supplier = rec.supplier;
        std::size_t user = rec.user;
        if (!same_index) {
            const auto& own = table.index();
            supplier = index.resolve(own.country_code(own.country_of(rec.supplier)),
                                     own.sector_code(own.sector_of(rec.supplier)));
            user = index.resolve(own.country_code(own.country_of(rec.user)),
                                 own.sector_code(own.sector_of(rec.user)));
        }
        triplets.emplace_back(static_cast<int>(user), static_cast<int>(supplier), rec.value);
    }

    FlowMatrix out;
    out.intermediate.resize(n, n);
    out.intermediate.setFromTriplets(triplets.begin(), triplets.end());
    out.intermediate.makeCompressed();

    if (same_index) {
        out.final_use = table.final_use();
    } else {
        out.final_use = Eigen::VectorXd::Zero(n);
        const auto& own = table.index();
        for (Eigen::Index j = 0; j < table.final_use().size(); ++j) {
            auto mapped = index.resolve(own.country_code(own.country_of(j)),
                                        own.sector_code(own.sector_of(j)));
            out.final_use[static_cast<Eigen::Index>(mapped)] = table.final_use()[j];
        }
    }
    return out;
}

SizeWeights compute_sizes(const FlowMatrix& flows) {
    const auto& x = flows.intermediate;
    SizeWeights out;
    out.z = Eigen::VectorXd::Zero(x.cols());
    for (Eigen::Index j = 0; j < x.outerSize(); ++j) {
        double sum = 0.0;
        for (Eigen::SparseMatrix<double>::InnerIterator it(x, j); it; ++it) {
            sum += it.value();
        }
        out.z[j] = sum;
    }
    return out;
}

AllocationMatrix compute_allocation(const FlowMatrix& flows, const SizeWeights& sizes) {
    const auto& x = flows.intermediate;
    if (sizes.z.size() != x.cols()) {
        throw ArgumentError("size vector length does not match flow matrix");
    }
    AllocationMatrix out;
    out.shares = x;
    out.active.assign(static_cast<std::size_t>(x.cols()), 0);
    for (Eigen::Index j = 0; j < out.shares.outerSize(); ++j) {
        const double z = sizes.z[j];
        if (z > 0.0) {
            out.active[static_cast<std::size_t>(j)] = 1;
            for (Eigen::SparseMatrix<double>::InnerIterator it(out.shares, j); it; ++it) {
                it.valueRef() /= z;
            }
        } else {
            // Inactive supplier: column must be exactly zero.
            for (Eigen::SparseMatrix<double>::InnerIterator it(out.shares, j); it; ++it) {
                it.valueRef() = 0.0;
            }
        }
    }
    return out;
}

LeakageRates compute_leakage(const FlowMatrix& flows) {
    const SizeWeights sizes = compute_sizes(flows);
    LeakageRates out;
    out.beta = Eigen::VectorXd::Zero(sizes.z.size());
    for (Eigen::Index j = 0; j < sizes.z.size(); ++j) {
        const double total = sizes.z[j] + flows.final_use[j];
        out.beta[j] = total > 0.0 ? flows.final_use[j] / total : 1.0;
    }
    return out;
}

} // namespace vulnet
