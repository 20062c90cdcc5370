#pragma once

#include "vulnet/flow.hpp"
#include "vulnet/index.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <optional>
#include <string>

namespace vulnet {

enum class TableFormat {
    canonical, ///< long-format flow records plus a companion final-use file
    oecd,      ///< wide matrix with COUNTRY_SECTOR row/column labels
};

/// Where a table comes from. `final_use` applies to the canonical format
/// only; the OECD layout carries final demand in its own columns.
struct IngestSource {
    TableFormat format = TableFormat::canonical;
    std::filesystem::path flows;
    std::optional<std::filesystem::path> final_use;
    std::string label;
};

/// Parses an inter-country input-output table into the canonical flow
/// representation. Negative raw values are clamped to zero and counted in
/// the table metadata. Malformed content raises ParseError with file and
/// line context; unresolvable codes raise SchemaError.
FlowTable parse_icio(const IngestSource& source);

/// Writes a table in the canonical interchange format: a flow file with
/// header `supplier_country,supplier_sector,user_country,user_sector,value`
/// and a final-use file with header `supplier_country,supplier_sector,final_use`
/// covering every node in index order. Values carry 17 significant digits,
/// so a parse of the emitted files reproduces the table exactly.
void emit_canonical(const FlowTable& table, const std::filesystem::path& flows_path,
                    const std::filesystem::path& final_use_path);

/// Ground truth stored next to synthetic fixtures: sizes, allocation column
/// sums and leakage rates, computed independently by the generator.
struct FixtureGroundTruth {
    Eigen::VectorXd z;
    Eigen::VectorXd allocation_colsums;
    Eigen::VectorXd beta;
};

void write_ground_truth(const FixtureGroundTruth& truth, const CountrySectorIndex& index,
                        const std::filesystem::path& path);

FixtureGroundTruth read_ground_truth(const std::filesystem::path& path,
                                     const CountrySectorIndex& index);

} // namespace vulnet
