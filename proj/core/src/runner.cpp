#include "vulnet/runner.hpp"

#include "vulnet/errors.hpp"
#include "vulnet/version.hpp"

#include <algorithm>
#include <atomic>
#include <ctime>
#include <numeric>
#include <thread>

namespace vulnet {

namespace {

std::string utc_timestamp() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Foreign country codes sorted lexicographically; scenario order is part
/// of the report contract, independent of table column order.
std::vector<std::string> foreign_countries(const CountrySectorIndex& index,
                                           const std::string& target) {
    if (!index.find_country(target)) {
        throw SchemaError("unknown target country '" + target + "'");
    }
    std::vector<std::string> codes;
    for (const auto& code : index.countries()) {
        if (code != target) codes.push_back(code);
    }
    std::sort(codes.begin(), codes.end());
    return codes;
}

} // namespace

std::string to_string(ScenarioKind kind) {
    return kind == ScenarioKind::sector_level ? "sector" : "country";
}

std::vector<RestrictionSpec> enumerate_sector_scenarios(const CountrySectorIndex& index,
                                                        const std::string& target) {
    auto countries = foreign_countries(index, target);
    std::vector<std::string> sectors = index.sectors();
    std::sort(sectors.begin(), sectors.end());

    std::vector<RestrictionSpec> specs;
    specs.reserve(countries.size() * sectors.size());
    for (const auto& country : countries) {
        for (const auto& sector : sectors) {
            specs.push_back({target, country, {sector}});
        }
    }
    return specs;
}

std::vector<RestrictionSpec> enumerate_country_scenarios(const CountrySectorIndex& index,
                                                         const std::string& target) {
    auto countries = foreign_countries(index, target);
    std::vector<RestrictionSpec> specs;
    specs.reserve(countries.size());
    for (const auto& country : countries) {
        specs.push_back({target, country, {}});
    }
    return specs;
}

ScenarioContext make_scenario_context(const CountrySectorIndex& index,
                                      const AllocationMatrix& A, const LeakageRates& beta,
                                      const SizeWeights& Z, const std::string& target) {
    ScenarioContext context;
    context.index = &index;
    context.A = &A;
    context.beta = &beta;
    context.Z = &Z;
    context.target_country = target;

    auto target_pos = index.find_country(target);
    if (!target_pos) {
        throw SchemaError("unknown target country '" + target + "'");
    }

    context.kernel = build_kernel(A, beta);
    validate_kernel(context.kernel);

    context.mu = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(index.size()));
    for (std::size_t s = 0; s < index.sector_count(); ++s) {
        context.mu[static_cast<Eigen::Index>(index.node(*target_pos, s))] = 1.0;
    }
    context.benchmark_exposure = leontief_row_solve(context.kernel, context.mu);
    return context;
}

ScenarioResult run_single_scenario(const ScenarioContext& context,
                                   const RestrictionSpec& spec) {
    ScenarioResult result;
    result.spec = spec;

    SelectorSet sel = make_selectors(spec, *context.index);
    RestrictedAllocation restricted = apply_restriction(*context.A, sel);
    PropagationKernel counterfactual = restricted_kernel(restricted, *context.beta);

    PropagationDelta delta = exposure_delta(context.kernel, counterfactual, context.mu,
                                            &context.benchmark_exposure);
    result.gamma = gamma_index(delta, *context.Z, sel.nu);

    result.psi.reserve(restricted.restricted_columns.size());
    for (auto column : restricted.restricted_columns) {
        result.psi.emplace_back(column, restricted.psi[column]);
    }
    result.skipped_inactive = restricted.skipped_inactive;
    return result;
}

namespace {

ScenarioResult contained_scenario(const ScenarioContext& context, const RestrictionSpec& spec) {
    try {
        return run_single_scenario(context, spec);
    } catch (const TotalDependenceError& e) {
        ScenarioResult r;
        r.spec = spec;
        r.error_tag = "total_dependence";
        r.error_message = e.what();
        return r;
    } catch (const StabilityError& e) {
        ScenarioResult r;
        r.spec = spec;
        r.error_tag = "stability";
        r.error_message = e.what();
        return r;
    } catch (const SolveError& e) {
        ScenarioResult r;
        r.spec = spec;
        r.error_tag = "solve";
        r.error_message = e.what();
        return r;
    } catch (const std::exception& e) {
        ScenarioResult r;
        r.spec = spec;
        r.error_tag = "internal";
        r.error_message = e.what();
        return r;
    }
}

} // namespace

BatchReport run_batch(const CountrySectorIndex& index, const AllocationMatrix& A,
                      const LeakageRates& beta, const SizeWeights& Z,
                      const ScenarioClass& scenario_class, const BatchOptions& options) {
    std::vector<RestrictionSpec> specs =
        scenario_class.kind == ScenarioKind::sector_level
            ? enumerate_sector_scenarios(index, scenario_class.target_country)
            : enumerate_country_scenarios(index, scenario_class.target_country);
    if (specs.empty()) {
        throw DegenerateClassError("scenario class is empty (single-country table?)");
    }

    ScenarioContext context =
        make_scenario_context(index, A, beta, Z, scenario_class.target_country);

    // Each worker writes only its own enumeration slots, so the collected
    // vector is identical for any worker count or completion order.
    std::vector<ScenarioResult> slots(specs.size());
    const std::size_t workers = std::max<std::size_t>(1, options.workers);
    if (workers == 1) {
        for (std::size_t i = 0; i < specs.size(); ++i) {
            slots[i] = contained_scenario(context, specs[i]);
        }
    } else {
        std::atomic<std::size_t> cursor{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t i = cursor.fetch_add(1, std::memory_order_relaxed);
                    if (i >= specs.size()) return;
                    slots[i] = contained_scenario(context, specs[i]);
                }
            });
        }
        for (auto& t : pool) t.join();
    }

    BatchReport report;
    report.scenario_class = scenario_class;
    report.benchmark_certificate = context.kernel.certificate;
    report.provenance.input_digests = options.input_digests;
    report.provenance.timestamp = utc_timestamp();
    report.provenance.version = kVersion;

    for (auto& result : slots) {
        (result.failed() ? report.failures : report.results).push_back(std::move(result));
    }
    if (report.results.empty()) {
        throw DegenerateClassError("every scenario in the class failed");
    }

    std::vector<double> gammas;
    gammas.reserve(report.results.size());
    for (const auto& r : report.results) gammas.push_back(r.gamma);
    std::vector<double> normalized = normalize_scores(gammas);
    for (std::size_t i = 0; i < normalized.size(); ++i) {
        report.results[i].gamma_normalized = normalized[i];
    }

    std::vector<std::size_t> order(report.results.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& ra = report.results[a];
        const auto& rb = report.results[b];
        if (ra.gamma != rb.gamma) return ra.gamma > rb.gamma;
        if (ra.spec.source_country != rb.spec.source_country) {
            return ra.spec.source_country < rb.spec.source_country;
        }
        return ra.spec.restricted_sectors < rb.spec.restricted_sectors;
    });
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        report.results[order[pos]].rank = pos + 1;
    }

    std::vector<ConcentrationEntry> entries;
    entries.reserve(report.results.size());
    for (const auto& r : report.results) {
        entries.push_back({r.spec.source_country,
                           r.spec.all_sectors() ? "ALL" : r.spec.restricted_sectors.front(),
                           r.gamma});
    }
    report.concentration = concentration(std::move(entries));
    return report;
}

} // namespace vulnet
