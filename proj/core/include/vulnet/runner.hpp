#pragma once

#include "vulnet/flow.hpp"
#include "vulnet/index.hpp"
#include "vulnet/kernel.hpp"
#include "vulnet/restriction.hpp"
#include "vulnet/vulnerability.hpp"

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace vulnet {

enum class ScenarioKind {
    sector_level,  ///< one source sector per scenario, (C-1)*S of them
    country_level, ///< all sectors of one source country, C-1 of them
};

struct ScenarioClass {
    ScenarioKind kind = ScenarioKind::sector_level;
    std::string target_country;
};

std::string to_string(ScenarioKind kind);

struct ScenarioResult {
    RestrictionSpec spec;
    double gamma = std::numeric_limits<double>::quiet_NaN();
    double gamma_normalized = std::numeric_limits<double>::quiet_NaN();
    /// 1-based rank within the class, descending gamma with lexicographic
    /// (country, sector) tie-break; 0 until ranked. Failed scenarios are
    /// never ranked.
    std::size_t rank = 0;
    /// (column node id, psi) for each restricted column that was rewritten.
    std::vector<std::pair<std::uint32_t, double>> psi;
    std::size_t skipped_inactive = 0;
    /// Short machine tag when the scenario failed, e.g. "total_dependence".
    std::string error_tag;
    std::string error_message;

    bool failed() const { return !error_tag.empty(); }
};

struct BatchProvenance {
    std::vector<std::string> input_digests;
    std::string timestamp; ///< UTC, second resolution
    std::string version;
};

struct BatchReport {
    ScenarioClass scenario_class;
    /// Successful scenarios in enumeration order (rank recorded per entry).
    std::vector<ScenarioResult> results;
    /// Contained per-scenario failures, also in enumeration order.
    std::vector<ScenarioResult> failures;
    ConcentrationStats concentration;
    StabilityReport benchmark_certificate;
    BatchProvenance provenance;
};

/// One spec per (foreign country, sector), (C-1)*S total, ordered by
/// (country code, sector code). Unknown target raises SchemaError.
std::vector<RestrictionSpec> enumerate_sector_scenarios(const CountrySectorIndex& index,
                                                        const std::string& target);

/// One all-sector spec per foreign country, C-1 total, ordered by country
/// code.
std::vector<RestrictionSpec> enumerate_country_scenarios(const CountrySectorIndex& index,
                                                         const std::string& target);

/// Read-only state shared by every scenario of a batch: the certified
/// benchmark kernel, the target-row selector and the benchmark exposure
/// solved once. Borrows the calibration inputs; keep them alive.
struct ScenarioContext {
    const CountrySectorIndex* index = nullptr;
    const AllocationMatrix* A = nullptr;
    const LeakageRates* beta = nullptr;
    const SizeWeights* Z = nullptr;
    std::string target_country;
    PropagationKernel kernel;
    Eigen::VectorXd mu;
    Eigen::VectorXd benchmark_exposure;
};

/// Builds and certifies the benchmark kernel (StabilityError aborts) and
/// solves the benchmark exposure once.
ScenarioContext make_scenario_context(const CountrySectorIndex& index,
                                      const AllocationMatrix& A, const LeakageRates& beta,
                                      const SizeWeights& Z, const std::string& target);

/// Evaluates one restriction against the shared context. Errors propagate;
/// the batch driver contains them, the single-scenario CLI maps them to
/// exit codes. The result carries gamma but no rank or normalized score.
ScenarioResult run_single_scenario(const ScenarioContext& context,
                                   const RestrictionSpec& spec);

struct BatchOptions {
    std::size_t workers = 1;
    /// Digests of the input files, recorded in provenance and file names.
    std::vector<std::string> input_digests;
};

/// Runs the full scenario class. Scenario evaluations may execute on any
/// number of workers; outputs are slotted by enumeration position, so the
/// report is byte-stable across worker counts. Scenario failures are
/// contained as BatchReport::failures; only benchmark certification or a
/// degenerate score class abort the batch.
BatchReport run_batch(const CountrySectorIndex& index, const AllocationMatrix& A,
                      const LeakageRates& beta, const SizeWeights& Z,
                      const ScenarioClass& scenario_class, const BatchOptions& options = {});

} // namespace vulnet
