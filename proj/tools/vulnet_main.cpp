#include "vulnet/detail/csv.hpp"
#include "vulnet/detail/digest.hpp"
#include "vulnet/errors.hpp"
#include "vulnet/flow.hpp"
#include "vulnet/ingest.hpp"
#include "vulnet/kernel.hpp"
#include "vulnet/report.hpp"
#include "vulnet/runner.hpp"
#include "vulnet/synthetic.hpp"
#include "vulnet/version.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#ifndef VULNET_BUILD_DIGEST
#define VULNET_BUILD_DIGEST "unknown"
#endif

namespace {

namespace fs = std::filesystem;

std::string version_string() {
    return std::string("vulnet ") + vulnet::kVersion + " (build " VULNET_BUILD_DIGEST ")";
}

struct DataOptions {
    std::string format = "canonical";
    std::string flows;
    std::string final_use;
    std::string label;
};

void add_data_options(CLI::App* cmd, DataOptions& data) {
    cmd->add_option("--format", data.format, "Input table layout")
        ->check(CLI::IsMember({"canonical", "oecd"}))
        ->capture_default_str();
    cmd->add_option("--flows", data.flows, "Flow table file")->required();
    cmd->add_option("--final-use", data.final_use,
                    "Final-use file (canonical format only)");
    cmd->add_option("--label", data.label, "Source label recorded in metadata");
}

struct LoadedTable {
    vulnet::FlowTable table;
    std::vector<std::string> digests;
};

LoadedTable load_table(const DataOptions& data) {
    vulnet::IngestSource source;
    source.format = data.format == "oecd" ? vulnet::TableFormat::oecd
                                          : vulnet::TableFormat::canonical;
    source.flows = data.flows;
    if (!data.final_use.empty()) source.final_use = data.final_use;
    source.label = data.label;

    LoadedTable loaded;
    loaded.digests.push_back(vulnet::detail::file_digest(source.flows));
    if (source.final_use) {
        loaded.digests.push_back(vulnet::detail::file_digest(*source.final_use));
    }
    loaded.table = vulnet::parse_icio(source);
    return loaded;
}

struct Calibration {
    vulnet::FlowMatrix matrix;
    vulnet::SizeWeights sizes;
    vulnet::AllocationMatrix allocation;
    vulnet::LeakageRates leakage;
};

Calibration calibrate(const vulnet::FlowTable& table) {
    Calibration cal;
    cal.matrix = vulnet::build_flow_matrix(table, table.index());
    cal.sizes = vulnet::compute_sizes(cal.matrix);
    cal.allocation = vulnet::compute_allocation(cal.matrix, cal.sizes);
    cal.leakage = vulnet::compute_leakage(cal.matrix);
    return cal;
}

std::vector<std::string> parse_sector_list(const std::string& sectors) {
    if (sectors.empty()) {
        throw vulnet::ArgumentError("--sectors needs a comma-separated list or ALL");
    }
    if (sectors == "ALL") return {};
    std::vector<std::string> out;
    for (auto field : vulnet::detail::split_fields(sectors, ',')) {
        if (field.empty()) {
            throw vulnet::ArgumentError("empty sector code in --sectors list");
        }
        out.emplace_back(field);
    }
    return out;
}

void ensure_out_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw vulnet::ArgumentError("cannot create output directory " + dir.string() + ": " +
                                    ec.message());
    }
}

/// Exit codes, also listed in the README:
///   0 success, 2 malformed input file, 3 stability certification failed,
///   4 total dependence on the target, 5 unknown code or invalid spec,
///   6 computation failed, 64 usage error, 70 internal error.
/// `schema_as_input`: during ingestion a schema error means the file is
/// inconsistent (2); in scenario commands it means a bad user code (5).
template <typename Fn>
int guarded(bool schema_as_input, Fn&& fn) {
    try {
        fn();
        return 0;
    } catch (const vulnet::TotalDependenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const vulnet::StabilityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const vulnet::SolveError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 6;
    } catch (const vulnet::SizeGuardError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 6;
    } catch (const vulnet::DegenerateClassError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 6;
    } catch (const vulnet::SpecError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 5;
    } catch (const vulnet::SchemaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return schema_as_input ? 2 : 5;
    } catch (const vulnet::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const vulnet::ArgumentError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 64;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 70;
    }
}

struct IngestOptions {
    DataOptions data;
    std::string out = ".";
};

int cmd_ingest(const IngestOptions& opt) {
    return guarded(true, [&] {
        ensure_out_dir(opt.out);
        LoadedTable loaded = load_table(opt.data);
        const auto& table = loaded.table;
        const auto& index = table.index();

        vulnet::emit_canonical(table, fs::path(opt.out) / "canonical_flows.csv",
                               fs::path(opt.out) / "canonical_final_use.csv");

        Calibration cal = calibrate(table);
        vulnet::emit_country_flows(cal.matrix, index, opt.out, loaded.digests);

        // Certification runs before the summary so a non-viable table
        // fails loudly (exit 3) rather than emitting a half-true summary.
        vulnet::PropagationKernel kernel =
            vulnet::build_kernel(cal.allocation, cal.leakage);
        vulnet::validate_kernel(kernel);

        std::string summary;
        summary += "source_label: " + table.metadata().source_label + "\n";
        summary += "countries: " + std::to_string(index.country_count()) + "\n";
        summary += "sectors: " + std::to_string(index.sector_count()) + "\n";
        summary += "nodes: " + std::to_string(index.size()) + "\n";
        summary += "records: " + std::to_string(table.records().size()) + "\n";
        summary += "active_suppliers: " + std::to_string(cal.allocation.active_count()) + "\n";
        summary +=
            "clamped_negatives: " + std::to_string(table.metadata().clamped_negatives) + "\n";
        summary += "colsum_bound: " + vulnet::detail::format_double(kernel.colsum_bound) + "\n";
        summary += "certificate: " + kernel.certificate.to_text() + "\n";

        std::ofstream file(fs::path(opt.out) / "calibration_summary.txt");
        if (!file) {
            throw vulnet::ParseError("cannot write calibration summary in " + opt.out);
        }
        file << summary;
        std::cout << summary;
    });
}

struct RunOptions {
    DataOptions data;
    std::string target;
    std::string source;
    std::string sectors;
    std::string out;
};

int cmd_run(const RunOptions& opt) {
    return guarded(false, [&] {
        vulnet::RestrictionSpec spec;
        spec.target_country = opt.target;
        spec.source_country = opt.source;
        spec.restricted_sectors = parse_sector_list(opt.sectors);

        LoadedTable loaded = load_table(opt.data);
        Calibration cal = calibrate(loaded.table);
        vulnet::ScenarioContext context =
            vulnet::make_scenario_context(loaded.table.index(), cal.allocation, cal.leakage,
                                          cal.sizes, opt.target);
        vulnet::ScenarioResult result = vulnet::run_single_scenario(context, spec);

        std::string record;
        record += "scenario: " + spec.to_text() + "\n";
        record += "gamma: " + vulnet::detail::format_double(result.gamma) + "\n";
        record += "skipped_inactive: " + std::to_string(result.skipped_inactive) + "\n";
        for (const auto& [column, psi] : result.psi) {
            record += "psi: " + loaded.table.index().node_label(column) + " " +
                      vulnet::detail::format_double(psi) + "\n";
        }
        std::cout << record;

        if (!opt.out.empty()) {
            ensure_out_dir(opt.out);
            auto path = fs::path(opt.out) /
                        ("scenario_" + opt.target + "_" + opt.source + "_" +
                         vulnet::detail::combine_digests(loaded.digests) + ".txt");
            std::ofstream file(path);
            if (!file) throw vulnet::ParseError("cannot write " + path.string());
            file << record;
            std::cout << "saved: " << path.string() << "\n";
        }
    });
}

struct BatchOptions {
    DataOptions data;
    std::string scenario_class = "sector";
    std::string target;
    std::size_t workers = 1;
    std::string out = ".";
    std::size_t top_n = 0;
    std::size_t bins = 40;
    std::string exclude_sectors;
};

int cmd_batch(const BatchOptions& opt) {
    return guarded(false, [&] {
        ensure_out_dir(opt.out);
        LoadedTable loaded = load_table(opt.data);
        Calibration cal = calibrate(loaded.table);

        vulnet::ScenarioClass cls;
        cls.kind = opt.scenario_class == "sector" ? vulnet::ScenarioKind::sector_level
                                                  : vulnet::ScenarioKind::country_level;
        cls.target_country = opt.target;

        vulnet::BatchOptions batch;
        batch.workers = opt.workers;
        batch.input_digests = loaded.digests;
        vulnet::BatchReport report = vulnet::run_batch(
            loaded.table.index(), cal.allocation, cal.leakage, cal.sizes, cls, batch);

        std::vector<fs::path> written;
        written.push_back(vulnet::emit_ranking(report, opt.out, opt.top_n));
        written.push_back(vulnet::emit_distribution(report, opt.out, opt.bins));
        written.push_back(vulnet::emit_concentration(report, opt.out));
        written.push_back(vulnet::emit_failures(report, opt.out));
        if (cls.kind == vulnet::ScenarioKind::country_level) {
            written.push_back(vulnet::emit_map_data(report, opt.out));
        }
        if (!opt.exclude_sectors.empty()) {
            written.push_back(vulnet::emit_ranking(report, opt.out, opt.top_n,
                                                   parse_sector_list(opt.exclude_sectors)));
        }

        std::cout << "scenarios: " << report.results.size() + report.failures.size()
                  << " (failed: " << report.failures.size() << ")\n";
        const auto& top = *std::min_element(
            report.results.begin(), report.results.end(),
            [](const auto& a, const auto& b) { return a.rank < b.rank; });
        std::cout << "top: " << top.spec.to_text() << " gamma "
                  << vulnet::detail::format_double(top.gamma) << "\n";
        for (const auto& path : written) {
            std::cout << "wrote: " << path.string() << "\n";
        }
    });
}

struct FixtureOptions {
    std::uint64_t seed = 1;
    std::size_t countries = 0;
    std::size_t sectors = 0;
    double density = 0.02;
    double min_leakage = 0.05;
    std::string out = ".";
};

int cmd_fixture(const FixtureOptions& opt) {
    return guarded(true, [&] {
        ensure_out_dir(opt.out);
        vulnet::SyntheticParams params;
        params.seed = opt.seed;
        params.countries = opt.countries;
        params.sectors = opt.sectors;
        params.density = opt.density;
        params.min_leakage = opt.min_leakage;
        vulnet::SyntheticEconomy economy = vulnet::generate_economy(params);

        vulnet::emit_canonical(economy.table, fs::path(opt.out) / "fixture_flows.csv",
                               fs::path(opt.out) / "fixture_final_use.csv");
        vulnet::write_ground_truth(economy.sidecar(), economy.table.index(),
                                   fs::path(opt.out) / "fixture_truth.csv");

        std::cout << "seed: " << opt.seed << "\n";
        std::cout << "countries: " << economy.table.index().country_count() << "\n";
        std::cout << "sectors: " << economy.table.index().sector_count() << "\n";
        std::cout << "nodes: " << economy.table.index().size() << "\n";
        std::cout << "records: " << economy.table.records().size() << "\n";
        std::cout << "wrote: " << (fs::path(opt.out) / "fixture_flows.csv").string() << "\n";
        std::cout << "wrote: " << (fs::path(opt.out) / "fixture_final_use.csv").string()
                  << "\n";
        std::cout << "wrote: " << (fs::path(opt.out) / "fixture_truth.csv").string() << "\n";
    });
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"world production network vulnerability toolkit"};
    app.set_version_flag("--version", version_string());
    app.set_config("--config", "", "Config file (INI; flags override)");
    app.require_subcommand(0, 1);

    IngestOptions ingest_opt;
    auto* ingest = app.add_subcommand(
        "ingest", "Parse a table, write canonical files and a calibration summary");
    add_data_options(ingest, ingest_opt.data);
    ingest->add_option("--out", ingest_opt.out, "Output directory")->capture_default_str();

    RunOptions run_opt;
    auto* run = app.add_subcommand("run", "Evaluate a single supply restriction");
    add_data_options(run, run_opt.data);
    run->add_option("--target", run_opt.target, "Target country code")->required();
    run->add_option("--source", run_opt.source, "Source country code")->required();
    run->add_option("--sectors", run_opt.sectors, "Comma-separated sector codes or ALL")
        ->required();
    run->add_option("--out", run_opt.out, "Directory for the scenario record (optional)");

    BatchOptions batch_opt;
    auto* batch =
        app.add_subcommand("batch", "Run a full scenario class and emit report files");
    add_data_options(batch, batch_opt.data);
    batch->add_option("--class", batch_opt.scenario_class, "Scenario class")
        ->check(CLI::IsMember({"sector", "country"}))
        ->capture_default_str();
    batch->add_option("--target", batch_opt.target, "Target country code")->required();
    batch->add_option("--workers", batch_opt.workers, "Worker thread count")
        ->capture_default_str();
    batch->add_option("--out", batch_opt.out, "Output directory")->capture_default_str();
    batch->add_option("--top-n", batch_opt.top_n, "Ranking rows to emit (0 = all)")
        ->capture_default_str();
    batch->add_option("--bins", batch_opt.bins, "Distribution histogram bins")
        ->capture_default_str();
    batch->add_option("--exclude-sectors", batch_opt.exclude_sectors,
                      "Also emit a ranking excluding these sector codes");

    FixtureOptions fixture_opt;
    auto* fixture =
        app.add_subcommand("fixture", "Generate a synthetic economy with ground truth");
    fixture->add_option("--seed", fixture_opt.seed, "Generator seed")->capture_default_str();
    fixture->add_option("--countries", fixture_opt.countries, "Country count")->required();
    fixture->add_option("--sectors", fixture_opt.sectors, "Sector count")->required();
    fixture->add_option("--density", fixture_opt.density, "Expected nonzero cell fraction")
        ->capture_default_str();
    fixture->add_option("--min-leakage", fixture_opt.min_leakage, "Leakage rate floor")
        ->capture_default_str();
    fixture->add_option("--out", fixture_opt.out, "Output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 64; // one documented usage exit instead of CLI11's table
    }

    if (app.got_subcommand(ingest)) return cmd_ingest(ingest_opt);
    if (app.got_subcommand(run)) return cmd_run(run_opt);
    if (app.got_subcommand(batch)) return cmd_batch(batch_opt);
    if (app.got_subcommand(fixture)) return cmd_fixture(fixture_opt);
    std::cout << app.help();
    return 0;
}
