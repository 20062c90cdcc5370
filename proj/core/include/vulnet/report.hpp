#pragma once

#include "vulnet/flow.hpp"
#include "vulnet/runner.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace vulnet {

/// Log-spaced histogram over the positive values; nonpositive inputs are
/// dropped and counted (the axis is logarithmic). Bins are half-open
/// [lo, hi), except the last, which closes at the maximum so it is
/// counted. A single distinct value degenerates to one bin.
struct LogHistogram {
    std::vector<double> edges; ///< bins + 1 edges, ascending
    std::vector<std::size_t> counts;
    std::size_t dropped_nonpositive = 0;
};

/// DegenerateClassError when no positive values remain.
LogHistogram log_histogram(const std::vector<double>& values, std::size_t bins);

/// All emissions write delimited text with `# key: value` header lines
/// (only `# generated_at:` varies between identical runs) and values at 17
/// significant digits so files re-parse to the exact in-memory numbers.
/// File names carry the scenario class, target and a 12-character digest
/// of the input files.

/// Descending (rank, source country, sector or ALL, gamma, score) table.
/// `top_n` = 0 emits every row. A nonempty `exclude_sectors` drops those
/// source sectors and re-normalizes within the filtered set (its best
/// score becomes exactly 1); only sector-level reports accept a filter.
std::filesystem::path emit_ranking(const BatchReport& report,
                                   const std::filesystem::path& out_dir, std::size_t top_n = 0,
                                   const std::vector<std::string>& exclude_sectors = {});

/// Histogram of the positive raw gamma values, log-spaced (default 40
/// bins), with the dropped-count noted in the header.
std::filesystem::path emit_distribution(const BatchReport& report,
                                        const std::filesystem::path& out_dir,
                                        std::size_t bins = 40);

/// (k, cumulative top-k share) rows plus clamp/exclusion diagnostics.
std::filesystem::path emit_concentration(const BatchReport& report,
                                         const std::filesystem::path& out_dir);

/// (country, normalized score) rows for choropleth joins, country-level
/// reports only (ArgumentError otherwise), ordered by country code.
std::filesystem::path emit_map_data(const BatchReport& report,
                                    const std::filesystem::path& out_dir);

/// One row per contained scenario failure; header-only file when the
/// batch was clean.
std::filesystem::path emit_failures(const BatchReport& report,
                                    const std::filesystem::path& out_dir);

struct CountryFlowPaths {
    std::filesystem::path flows; ///< C x C aggregated intermediate flows
    std::filesystem::path sizes; ///< per-country total intermediate output
};

/// Country-aggregated flow totals (every ordered country pair, fixed
/// accumulation order) plus node sizes.
CountryFlowPaths emit_country_flows(const FlowMatrix& flows, const CountrySectorIndex& index,
                                    const std::filesystem::path& out_dir,
                                    const std::vector<std::string>& input_digests);

} // namespace vulnet
