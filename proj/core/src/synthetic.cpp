#include "vulnet/synthetic.hpp"

#include "vulnet/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <random>

namespace vulnet {

namespace {

/// Uniform in [0, 1) from the top 53 bits; identical on every platform,
/// unlike std::uniform_real_distribution.
double unit_real(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::string country_code(std::size_t i) {
    char buf[4] = {static_cast<char>('A' + i / 676 % 26), static_cast<char>('A' + i / 26 % 26),
                   static_cast<char>('A' + i % 26), '\0'};
    return buf;
}

std::string sector_code(std::size_t s) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "S%02zu", s + 1);
    return buf;
}

} // namespace

SyntheticEconomy generate_economy(const SyntheticParams& params) {
    if (params.countries < 2 || params.sectors < 1) {
        throw ArgumentError("synthetic economy needs at least two countries and one sector");
    }
    if (params.countries > 17576) {
        throw ArgumentError("three-letter country codes cap the country count at 17576");
    }
    if (!(params.density > 0.0) || params.density > 1.0) {
        throw ArgumentError("density must lie in (0, 1]");
    }
    if (!(params.min_leakage > 0.0) || params.min_leakage >= 1.0) {
        throw ArgumentError("min_leakage must lie in (0, 1)");
    }

    std::vector<std::string> countries(params.countries);
    std::vector<std::string> sectors(params.sectors);
    for (std::size_t i = 0; i < params.countries; ++i) countries[i] = country_code(i);
    for (std::size_t s = 0; s < params.sectors; ++s) sectors[s] = sector_code(s);
    CountrySectorIndex index(std::move(countries), std::move(sectors));

    const auto n = index.size();
    std::mt19937_64 rng(params.seed);

    constexpr double kValueLow = 0.1;
    constexpr double kValueSpan = 9.9; // values in [0.1, 10)

    // Records land grouped by supplier column with users ascending, the
    // same order the downstream column sums accumulate in.
    std::vector<FlowRecord> records;
    records.reserve(static_cast<std::size_t>(params.density * static_cast<double>(n) *
                                             static_cast<double>(n)) +
                    n);
    SyntheticEconomy out;
    out.z = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    out.allocation_colsums = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    out.beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));

    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t first = records.size();
        for (std::size_t i = 0; i < n; ++i) {
            if (unit_real(rng) >= params.density) continue;
            double value = kValueLow + kValueSpan * unit_real(rng);
            records.push_back({static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(i),
                               value});
        }
        if (records.size() == first) {
            // Guarantee a buyer so every supplier stays active.
            auto i = static_cast<std::uint32_t>(rng() % n);
            double value = kValueLow + kValueSpan * unit_real(rng);
            records.push_back({static_cast<std::uint32_t>(j), i, value});
        }
        double colsum = 0.0;
        for (std::size_t k = first; k < records.size(); ++k) colsum += records[k].value;
        out.z[static_cast<Eigen::Index>(j)] = colsum;
        double share_sum = 0.0;
        for (std::size_t k = first; k < records.size(); ++k) {
            share_sum += records[k].value / colsum;
        }
        out.allocation_colsums[static_cast<Eigen::Index>(j)] = share_sum;
    }

    // Rates stay on [min_leakage, min(0.95, min_leakage + 0.45)]; when the
    // floor already exceeds 0.95 every rate equals the floor.
    const double span =
        std::max(0.0, std::min(0.95, params.min_leakage + 0.45) - params.min_leakage);
    Eigen::VectorXd final_use(static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j) {
        double beta = params.min_leakage + span * unit_real(rng);
        out.beta[static_cast<Eigen::Index>(j)] = beta;
        // F = z * beta / (1 - beta) makes F / (z + F) reproduce beta.
        final_use[static_cast<Eigen::Index>(j)] =
            out.z[static_cast<Eigen::Index>(j)] * beta / (1.0 - beta);
    }

    TableMetadata meta;
    char label[64];
    std::snprintf(label, sizeof(label), "synthetic-seed%llu",
                  static_cast<unsigned long long>(params.seed));
    meta.source_label = label;
    out.table = FlowTable(std::move(index), std::move(records), std::move(final_use),
                          std::move(meta));
    return out;
}

} // namespace vulnet
