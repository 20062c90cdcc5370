#include "vulnet/ingest.hpp"

#include "vulnet/detail/csv.hpp"
#include "vulnet/errors.hpp"

#include <cmath>
#include <fstream>
#include <unordered_set>

namespace vulnet {

namespace {

using detail::LineReader;
using detail::format_double;
using detail::parse_double;
using detail::split_fields;

[[noreturn]] void parse_fail(const LineReader& reader, const std::string& what) {
    throw ParseError(reader.path().string() + ":" + std::to_string(reader.line_number()) +
                     ": " + what);
}

std::string_view strip_cr(const std::string& line) {
    std::string_view s(line);
    if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
    return s;
}

std::string_view trim_quotes(std::string_view s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
        return s.substr(1, s.size() - 2);
    }
    return s;
}

double read_value(const LineReader& reader, std::string_view field, std::size_t column,
                  std::size_t& clamped) {
    double v = 0.0;
    if (!parse_double(field, v)) {
        throw ParseError(reader.path().string() + ":" + std::to_string(reader.line_number()) +
                         ":" + std::to_string(column + 1) + ": not a number: '" +
                         std::string(field) + "'");
    }
    if (!std::isfinite(v)) {
        throw ParseError(reader.path().string() + ":" + std::to_string(reader.line_number()) +
                         ":" + std::to_string(column + 1) + ": non-finite value");
    }
    if (v < 0.0) {
        ++clamped;
        return 0.0;
    }
    return v;
}

constexpr std::string_view kFlowHeader =
    "supplier_country,supplier_sector,user_country,user_sector,value";
constexpr std::string_view kFinalUseHeader = "supplier_country,supplier_sector,final_use";

struct RawFinalUse {
    std::string country;
    std::string sector;
    double value;
};

struct RawFlow {
    std::string supplier_country;
    std::string supplier_sector;
    std::string user_country;
    std::string user_sector;
    double value;
};

FlowTable parse_canonical(const IngestSource& source) {
    IndexBuilder builder;
    std::size_t clamped = 0;

    // The final-use file covers the full node grid in index order when
    // written by this library, so scanning it first keeps round-tripped
    // tables on their original index ordering.
    std::vector<RawFinalUse> raw_final;
    if (source.final_use) {
        LineReader reader(*source.final_use);
        std::string line;
        if (!reader.next(line)) parse_fail(reader, "empty file");
        if (strip_cr(line) != kFinalUseHeader) {
            parse_fail(reader, "expected header '" + std::string(kFinalUseHeader) + "'");
        }
        while (reader.next(line)) {
            if (line.empty() || line == "\r") continue;
            auto fields = split_fields(line);
            if (fields.size() != 3) parse_fail(reader, "expected 3 fields");
            RawFinalUse row{std::string(fields[0]), std::string(fields[1]),
                            read_value(reader, fields[2], 2, clamped)};
            builder.add_country(row.country);
            builder.add_sector(row.sector);
            raw_final.push_back(std::move(row));
        }
    }

    std::vector<RawFlow> raw_flows;
    {
        LineReader reader(source.flows);
        std::string line;
        if (!reader.next(line)) parse_fail(reader, "empty file");
        if (strip_cr(line) != kFlowHeader) {
            parse_fail(reader, "expected header '" + std::string(kFlowHeader) + "'");
        }
        while (reader.next(line)) {
            if (line.empty() || line == "\r") continue;
            auto fields = split_fields(line);
            if (fields.size() != 5) parse_fail(reader, "expected 5 fields");
            RawFlow row{std::string(fields[0]), std::string(fields[1]), std::string(fields[2]),
                        std::string(fields[3]), read_value(reader, fields[4], 4, clamped)};
            builder.add_country(row.supplier_country);
            builder.add_sector(row.supplier_sector);
            builder.add_country(row.user_country);
            builder.add_sector(row.user_sector);
            raw_flows.push_back(std::move(row));
        }
    }

    CountrySectorIndex index = builder.build();

    Eigen::VectorXd final_use = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(index.size()));
    for (const auto& row : raw_final) {
        auto node = index.resolve(row.country, row.sector);
        final_use[static_cast<Eigen::Index>(node)] += row.value;
    }

    std::vector<FlowRecord> records;
    records.reserve(raw_flows.size());
    for (const auto& row : raw_flows) {
        auto supplier = index.resolve(row.supplier_country, row.supplier_sector);
        auto user = index.resolve(row.user_country, row.user_sector);
        records.push_back({static_cast<std::uint32_t>(supplier),
                           static_cast<std::uint32_t>(user), row.value});
    }

    TableMetadata meta;
    meta.source_label = source.label.empty() ? source.flows.filename().string() : source.label;
    meta.clamped_negatives = clamped;
    return FlowTable(std::move(index), std::move(records), std::move(final_use), std::move(meta));
}

struct OecdLabel {
    bool is_node = false; ///< splits as COUNTRY_REST
    std::string country;
    std::string rest;
};

OecdLabel split_oecd_label(std::string_view label) {
    OecdLabel out;
    auto pos = label.find('_');
    if (pos == std::string_view::npos || pos == 0 || pos + 1 >= label.size()) {
        return out;
    }
    out.is_node = true;
    out.country = std::string(label.substr(0, pos));
    out.rest = std::string(label.substr(pos + 1));
    return out;
}

/// Wide OECD layout. Row labels of the form COUNTRY_SECTOR define the
/// sector taxonomy; any column whose label is COUNTRY_X with X outside that
/// taxonomy is treated as a final-demand category and summed into the
/// supplier's final use. Bare-label rows and columns (VA, TLS, OUT, TOTAL
/// and similar aggregates) are ignored entirely.
FlowTable parse_oecd(const IngestSource& source) {
    std::vector<std::string> column_labels;
    IndexBuilder builder;
    std::unordered_set<std::string> sector_codes;

    // Pass 1: header labels plus every row label, to fix the taxonomy.
    {
        LineReader reader(source.flows);
        std::string line;
        if (!reader.next(line)) parse_fail(reader, "empty file");
        auto fields = split_fields(line);
        if (fields.size() < 2) parse_fail(reader, "header has no data columns");
        for (std::size_t i = 1; i < fields.size(); ++i) {
            column_labels.emplace_back(trim_quotes(fields[i]));
        }
        std::vector<std::string> row_countries;
        std::vector<std::string> row_sectors;
        while (reader.next(line)) {
            if (line.empty() || line == "\r") continue;
            auto pos = line.find(',');
            std::string_view label(line.data(), pos == std::string::npos ? line.size() : pos);
            auto parsed = split_oecd_label(trim_quotes(label));
            if (!parsed.is_node) continue;
            row_countries.push_back(parsed.country);
            row_sectors.push_back(parsed.rest);
            sector_codes.insert(parsed.rest);
        }
        // Countries in header appearance order first, then any row-only ones;
        // sectors in row appearance order.
        for (const auto& label : column_labels) {
            auto parsed = split_oecd_label(label);
            if (parsed.is_node && sector_codes.count(parsed.rest) > 0) {
                builder.add_country(parsed.country);
            }
        }
        for (std::size_t i = 0; i < row_countries.size(); ++i) {
            builder.add_country(row_countries[i]);
            builder.add_sector(row_sectors[i]);
        }
    }

    CountrySectorIndex index = builder.build();

    enum class ColumnKind : std::uint8_t { node, final_demand, ignored };
    std::vector<ColumnKind> column_kind(column_labels.size(), ColumnKind::ignored);
    std::vector<std::uint32_t> column_node(column_labels.size(), 0);
    for (std::size_t i = 0; i < column_labels.size(); ++i) {
        auto parsed = split_oecd_label(column_labels[i]);
        if (!parsed.is_node) continue;
        if (sector_codes.count(parsed.rest) > 0) {
            column_kind[i] = ColumnKind::node;
            column_node[i] = static_cast<std::uint32_t>(index.resolve(parsed.country, parsed.rest));
        } else {
            column_kind[i] = ColumnKind::final_demand;
        }
    }

    std::vector<FlowRecord> records;
    Eigen::VectorXd final_use = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(index.size()));
    std::size_t clamped = 0;

    // Pass 2: accumulate cells.
    {
        LineReader reader(source.flows);
        std::string line;
        reader.next(line); // header
        while (reader.next(line)) {
            if (line.empty() || line == "\r") continue;
            auto fields = split_fields(line);
            auto parsed = split_oecd_label(trim_quotes(fields[0]));
            if (!parsed.is_node || sector_codes.count(parsed.rest) == 0) continue;
            if (fields.size() != column_labels.size() + 1) {
                parse_fail(reader, "expected " + std::to_string(column_labels.size() + 1) +
                                       " fields, got " + std::to_string(fields.size()));
            }
            auto supplier =
                static_cast<std::uint32_t>(index.resolve(parsed.country, parsed.rest));
            for (std::size_t i = 0; i < column_labels.size(); ++i) {
                if (column_kind[i] == ColumnKind::ignored) continue;
                double v = read_value(reader, fields[i + 1], i + 1, clamped);
                if (v == 0.0) continue;
                if (column_kind[i] == ColumnKind::node) {
                    records.push_back({supplier, column_node[i], v});
                } else {
                    final_use[supplier] += v;
                }
            }
        }
    }

    TableMetadata meta;
    meta.source_label = source.label.empty() ? source.flows.filename().string() : source.label;
    meta.clamped_negatives = clamped;
    return FlowTable(std::move(index), std::move(records), std::move(final_use), std::move(meta));
}

} // namespace

FlowTable parse_icio(const IngestSource& source) {
    switch (source.format) {
        case TableFormat::canonical:
            return parse_canonical(source);
        case TableFormat::oecd:
            if (source.final_use) {
                throw ArgumentError(
                    "the OECD layout carries final demand in its own columns; "
                    "no separate final-use file applies");
            }
            return parse_oecd(source);
    }
    throw ArgumentError("unknown table format");
}

void emit_canonical(const FlowTable& table, const std::filesystem::path& flows_path,
                    const std::filesystem::path& final_use_path) {
    const auto& index = table.index();
    {
        std::ofstream out(flows_path);
        if (!out) throw ParseError("cannot write file: " + flows_path.string());
        out << kFlowHeader << "\n";
        for (const auto& rec : table.records()) {
            out << index.country_code(index.country_of(rec.supplier)) << ','
                << index.sector_code(index.sector_of(rec.supplier)) << ','
                << index.country_code(index.country_of(rec.user)) << ','
                << index.sector_code(index.sector_of(rec.user)) << ','
                << format_double(rec.value) << "\n";
        }
    }
    {
        std::ofstream out(final_use_path);
        if (!out) throw ParseError("cannot write file: " + final_use_path.string());
        out << kFinalUseHeader << "\n";
        for (std::size_t n = 0; n < index.size(); ++n) {
            out << index.country_code(index.country_of(n)) << ','
                << index.sector_code(index.sector_of(n)) << ','
                << format_double(table.final_use()[static_cast<Eigen::Index>(n)]) << "\n";
        }
    }
}

namespace {
constexpr std::string_view kGroundTruthHeader = "quantity,country,sector,value";

void write_truth_block(std::ofstream& out, const CountrySectorIndex& index,
                       std::string_view quantity, const Eigen::VectorXd& values) {
    for (std::size_t n = 0; n < index.size(); ++n) {
        out << quantity << ',' << index.country_code(index.country_of(n)) << ','
            << index.sector_code(index.sector_of(n)) << ','
            << format_double(values[static_cast<Eigen::Index>(n)]) << "\n";
    }
}
} // namespace

void write_ground_truth(const FixtureGroundTruth& truth, const CountrySectorIndex& index,
                        const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write file: " + path.string());
    out << kGroundTruthHeader << "\n";
    write_truth_block(out, index, "z", truth.z);
    write_truth_block(out, index, "a_colsum", truth.allocation_colsums);
    write_truth_block(out, index, "beta", truth.beta);
}

FixtureGroundTruth read_ground_truth(const std::filesystem::path& path,
                                     const CountrySectorIndex& index) {
    LineReader reader(path);
    std::string line;
    if (!reader.next(line)) parse_fail(reader, "empty file");

    FixtureGroundTruth truth;
    const auto n = static_cast<Eigen::Index>(index.size());
    truth.z = Eigen::VectorXd::Zero(n);
    truth.allocation_colsums = Eigen::VectorXd::Zero(n);
    truth.beta = Eigen::VectorXd::Zero(n);

    std::size_t clamped = 0;
    while (reader.next(line)) {
        if (line.empty() || line == "\r") continue;
        auto fields = split_fields(line);
        if (fields.size() != 4) parse_fail(reader, "expected 4 fields");
        auto node = static_cast<Eigen::Index>(index.resolve(fields[1], fields[2]));
        double v = read_value(reader, fields[3], 3, clamped);
        if (fields[0] == "z") {
            truth.z[node] = v;
        } else if (fields[0] == "a_colsum") {
            truth.allocation_colsums[node] = v;
        } else if (fields[0] == "beta") {
            truth.beta[node] = v;
        } else {
            parse_fail(reader, "unknown quantity '" + std::string(fields[0]) + "'");
        }
    }
    return truth;
}

} // namespace vulnet
