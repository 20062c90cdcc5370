#include "vulnet/report.hpp"

#include "vulnet/detail/csv.hpp"
#include "vulnet/detail/digest.hpp"
#include "vulnet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_set>

namespace vulnet {

namespace {

using detail::format_double;

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write file: " + path.string());
    return out;
}

std::string batch_digest(const BatchReport& report) {
    return detail::combine_digests(report.provenance.input_digests);
}

std::filesystem::path batch_file(const BatchReport& report,
                                 const std::filesystem::path& out_dir,
                                 const std::string& kind) {
    return out_dir / (kind + "_" + to_string(report.scenario_class.kind) + "_" +
                      report.scenario_class.target_country + "_" + batch_digest(report) +
                      ".csv");
}

void write_batch_header(std::ofstream& out, const BatchReport& report) {
    out << "# generated_at: " << report.provenance.timestamp << "\n";
    out << "# version: " << report.provenance.version << "\n";
    out << "# class: " << to_string(report.scenario_class.kind) << "\n";
    out << "# target: " << report.scenario_class.target_country << "\n";
    out << "# inputs: ";
    for (std::size_t i = 0; i < report.provenance.input_digests.size(); ++i) {
        if (i > 0) out << ',';
        out << report.provenance.input_digests[i];
    }
    out << "\n";
    out << "# benchmark: " << report.benchmark_certificate.to_text() << "\n";
}

std::string sector_label(const RestrictionSpec& spec) {
    return spec.all_sectors() ? "ALL" : spec.restricted_sectors.front();
}

} // namespace

LogHistogram log_histogram(const std::vector<double>& values, std::size_t bins) {
    if (bins < 1) throw ArgumentError("histogram needs at least one bin");
    LogHistogram hist;
    std::vector<double> positive;
    positive.reserve(values.size());
    for (double v : values) {
        if (v > 0.0) {
            positive.push_back(v);
        } else {
            ++hist.dropped_nonpositive;
        }
    }
    if (positive.empty()) {
        throw DegenerateClassError("no positive values; a log-axis histogram is undefined");
    }
    const auto [lo_it, hi_it] = std::minmax_element(positive.begin(), positive.end());
    const double lo = *lo_it;
    const double hi = *hi_it;

    if (lo == hi) {
        hist.edges = {lo, hi};
        hist.counts = {positive.size()};
        return hist;
    }

    const double log_lo = std::log(lo);
    const double log_span = std::log(hi) - log_lo;
    hist.edges.resize(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i) {
        hist.edges[i] =
            std::exp(log_lo + log_span * static_cast<double>(i) / static_cast<double>(bins));
    }
    hist.edges.front() = lo; // pin the ends against exp/log round-off
    hist.edges.back() = hi;

    hist.counts.assign(bins, 0);
    for (double v : positive) {
        auto bin = static_cast<std::size_t>(
            std::floor((std::log(v) - log_lo) / log_span * static_cast<double>(bins)));
        if (bin >= bins) bin = bins - 1; // the maximum closes the last bin
        ++hist.counts[bin];
    }
    return hist;
}

std::filesystem::path emit_ranking(const BatchReport& report,
                                   const std::filesystem::path& out_dir, std::size_t top_n,
                                   const std::vector<std::string>& exclude_sectors) {
    const bool filtered = !exclude_sectors.empty();
    if (filtered && report.scenario_class.kind != ScenarioKind::sector_level) {
        throw ArgumentError("a sector-exclusion filter applies to sector-level reports only");
    }

    std::vector<const ScenarioResult*> rows;
    rows.reserve(report.results.size());
    if (filtered) {
        std::unordered_set<std::string> excluded(exclude_sectors.begin(),
                                                 exclude_sectors.end());
        for (const auto& r : report.results) {
            if (excluded.count(sector_label(r.spec)) == 0) rows.push_back(&r);
        }
        if (rows.empty()) {
            throw DegenerateClassError("sector filter removed every scenario");
        }
    } else {
        for (const auto& r : report.results) rows.push_back(&r);
    }

    std::sort(rows.begin(), rows.end(), [](const ScenarioResult* a, const ScenarioResult* b) {
        if (a->gamma != b->gamma) return a->gamma > b->gamma;
        if (a->spec.source_country != b->spec.source_country) {
            return a->spec.source_country < b->spec.source_country;
        }
        return a->spec.restricted_sectors < b->spec.restricted_sectors;
    });

    std::vector<double> scores;
    if (filtered) {
        std::vector<double> gammas;
        gammas.reserve(rows.size());
        for (const auto* r : rows) gammas.push_back(r->gamma);
        scores = normalize_scores(gammas); // filtered best maps to exactly 1
    } else {
        scores.reserve(rows.size());
        for (const auto* r : rows) scores.push_back(r->gamma_normalized);
    }

    const std::size_t limit = top_n == 0 ? rows.size() : std::min(top_n, rows.size());
    auto path = batch_file(report, out_dir, filtered ? "ranking_filtered" : "ranking");
    auto out = open_out(path);
    write_batch_header(out, report);
    if (filtered) {
        out << "# excluded_sectors: ";
        for (std::size_t i = 0; i < exclude_sectors.size(); ++i) {
            if (i > 0) out << ',';
            out << exclude_sectors[i];
        }
        out << "\n";
    }
    out << "rank,source_country,source_sector,gamma,score\n";
    for (std::size_t i = 0; i < limit; ++i) {
        out << (i + 1) << ',' << rows[i]->spec.source_country << ','
            << sector_label(rows[i]->spec) << ',' << format_double(rows[i]->gamma) << ','
            << format_double(scores[i]) << "\n";
    }
    return path;
}

std::filesystem::path emit_distribution(const BatchReport& report,
                                        const std::filesystem::path& out_dir,
                                        std::size_t bins) {
    std::vector<double> gammas;
    gammas.reserve(report.results.size());
    for (const auto& r : report.results) gammas.push_back(r.gamma);
    LogHistogram hist = log_histogram(gammas, bins);

    auto path = batch_file(report, out_dir, "distribution");
    auto out = open_out(path);
    write_batch_header(out, report);
    out << "# dropped_nonpositive: " << hist.dropped_nonpositive << "\n";
    out << "bin_low,bin_high,count\n";
    for (std::size_t i = 0; i < hist.counts.size(); ++i) {
        out << format_double(hist.edges[i]) << ',' << format_double(hist.edges[i + 1]) << ','
            << hist.counts[i] << "\n";
    }
    return path;
}

std::filesystem::path emit_concentration(const BatchReport& report,
                                         const std::filesystem::path& out_dir) {
    auto path = batch_file(report, out_dir, "concentration");
    auto out = open_out(path);
    write_batch_header(out, report);
    out << "# clamped_tiny: " << report.concentration.clamped_tiny << "\n";
    out << "# excluded_negative: " << report.concentration.excluded_negative << "\n";
    out << "k,share\n";
    for (const auto& [k, share] : report.concentration.topk_shares) {
        out << k << ',' << format_double(share) << "\n";
    }
    return path;
}

std::filesystem::path emit_map_data(const BatchReport& report,
                                    const std::filesystem::path& out_dir) {
    if (report.scenario_class.kind != ScenarioKind::country_level) {
        throw ArgumentError("map data comes from country-level reports only");
    }
    std::vector<const ScenarioResult*> rows;
    rows.reserve(report.results.size());
    for (const auto& r : report.results) rows.push_back(&r);
    std::sort(rows.begin(), rows.end(), [](const ScenarioResult* a, const ScenarioResult* b) {
        return a->spec.source_country < b->spec.source_country;
    });

    auto path = batch_file(report, out_dir, "map");
    auto out = open_out(path);
    write_batch_header(out, report);
    out << "country,score\n";
    for (const auto* r : rows) {
        out << r->spec.source_country << ',' << format_double(r->gamma_normalized) << "\n";
    }
    return path;
}

std::filesystem::path emit_failures(const BatchReport& report,
                                    const std::filesystem::path& out_dir) {
    auto path = batch_file(report, out_dir, "failures");
    auto out = open_out(path);
    write_batch_header(out, report);
    out << "target,source,sectors,tag,message\n";
    for (const auto& f : report.failures) {
        std::string sectors = "ALL";
        if (!f.spec.all_sectors()) {
            sectors.clear();
            for (std::size_t i = 0; i < f.spec.restricted_sectors.size(); ++i) {
                if (i > 0) sectors += ';';
                sectors += f.spec.restricted_sectors[i];
            }
        }
        std::string message = f.error_message;
        std::replace(message.begin(), message.end(), ',', ';'); // keep the row parseable
        out << f.spec.target_country << ',' << f.spec.source_country << ',' << sectors << ','
            << f.error_tag << ',' << message << "\n";
    }
    return path;
}

CountryFlowPaths emit_country_flows(const FlowMatrix& flows, const CountrySectorIndex& index,
                                    const std::filesystem::path& out_dir,
                                    const std::vector<std::string>& input_digests) {
    const auto C = index.country_count();
    // Fixed accumulation order (columns ascending, rows ascending within)
    // keeps the aggregates bit-reproducible.
    std::vector<double> aggregate(C * C, 0.0);
    std::vector<double> totals(C, 0.0);
    for (Eigen::Index j = 0; j < flows.intermediate.outerSize(); ++j) {
        const auto supplier = index.country_of(static_cast<std::size_t>(j));
        for (Eigen::SparseMatrix<double>::InnerIterator it(flows.intermediate, j); it; ++it) {
            const auto user = index.country_of(static_cast<std::size_t>(it.row()));
            aggregate[supplier * C + user] += it.value();
            totals[supplier] += it.value();
        }
    }

    const std::string digest = detail::combine_digests(input_digests);
    CountryFlowPaths paths;
    paths.flows = out_dir / ("country_flows_" + digest + ".csv");
    paths.sizes = out_dir / ("country_sizes_" + digest + ".csv");

    {
        auto out = open_out(paths.flows);
        out << "supplier_country,user_country,value\n";
        for (std::size_t a = 0; a < C; ++a) {
            for (std::size_t b = 0; b < C; ++b) {
                out << index.country_code(a) << ',' << index.country_code(b) << ','
                    << format_double(aggregate[a * C + b]) << "\n";
            }
        }
    }
    {
        auto out = open_out(paths.sizes);
        out << "country,total_intermediate_output\n";
        for (std::size_t a = 0; a < C; ++a) {
            out << index.country_code(a) << ',' << format_double(totals[a]) << "\n";
        }
    }
    return paths;
}

} // namespace vulnet
