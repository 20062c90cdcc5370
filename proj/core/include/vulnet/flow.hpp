#pragma once

#include "vulnet/index.hpp"

#include <Eigen/SparseCore>

#include <cstdint>
#include <string>
#include <vector>

namespace vulnet {

/// One observed intermediate flow, supplier -> user, in currency units.
/// Node ids refer to the owning table's index.
struct FlowRecord {
    std::uint32_t supplier;
    std::uint32_t user;
    double value;
};

struct TableMetadata {
    std::string source_label;
    int year = 0; ///< 0 when unknown
    /// Number of negative raw cells clamped to zero at ingestion.
    std::size_t clamped_negatives = 0;
};

/// Observed intermediate flows plus non-intermediate (final-use) totals per
/// supplier, in the coordinate system of an immutable node index.
class FlowTable {
  public:
    FlowTable() = default;
    FlowTable(CountrySectorIndex index, std::vector<FlowRecord> records,
              Eigen::VectorXd final_use, TableMetadata metadata);

    const CountrySectorIndex& index() const { return index_; }
    const std::vector<FlowRecord>& records() const { return records_; }
    /// Dense length-N vector of non-intermediate use totals.
    const Eigen::VectorXd& final_use() const { return final_use_; }
    const TableMetadata& metadata() const { return metadata_; }

  private:
    CountrySectorIndex index_;
    std::vector<FlowRecord> records_;
    Eigen::VectorXd final_use_;
    TableMetadata metadata_;
};

/// N x N matrix of intermediate flows, X(user, supplier), plus the
/// final-use vector carried along from the table.
struct FlowMatrix {
    Eigen::SparseMatrix<double> intermediate; ///< column j = supplier j's sales
    Eigen::VectorXd final_use;
};

/// z_j = total intermediate output of supplier j (column sum of X).
struct SizeWeights {
    Eigen::VectorXd z;
};

/// Column-normalized allocation shares. Columns of suppliers with zero
/// intermediate output are kept as all-zero and flagged inactive.
struct AllocationMatrix {
    Eigen::SparseMatrix<double> shares;
    std::vector<std::uint8_t> active;

    std::size_t active_count() const;
};

/// beta_j = share of supplier j's total output that exits the
/// intermediate-input network. Inactive suppliers carry beta = 1.
struct LeakageRates {
    Eigen::VectorXd beta;
};

/// Accumulates table records into the flow matrix, summing duplicates.
/// The index argument may be the table's own index or an equivalent one;
/// codes unresolvable in it raise SchemaError.
FlowMatrix build_flow_matrix(const FlowTable& table, const CountrySectorIndex& index);

/// Column sums of X, accumulated in ascending row order so results are
/// bit-reproducible.
SizeWeights compute_sizes(const FlowMatrix& flows);

/// a_ij = x_ij / z_j for active columns; zero columns stay zero.
AllocationMatrix compute_allocation(const FlowMatrix& flows, const SizeWeights& sizes);

/// beta_j = F_j / (z_j + F_j); suppliers with zero total output get beta = 1.
LeakageRates compute_leakage(const FlowMatrix& flows);

} // namespace vulnet
