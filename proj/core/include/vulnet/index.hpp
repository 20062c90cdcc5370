#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace vulnet {

/// Bijection between (country code, sector code) pairs and flat node ids.
///
/// Nodes are ordered country-major: node(c, s) = c * sector_count() + s with
/// 0-based positions, so the first S nodes are the sectors of the first
/// country. Country and sector orderings are fixed at construction (file
/// appearance order for parsed tables) and never change afterwards.
class CountrySectorIndex {
  public:
    CountrySectorIndex() = default;
    CountrySectorIndex(std::vector<std::string> countries, std::vector<std::string> sectors);

    std::size_t country_count() const { return countries_.size(); }
    std::size_t sector_count() const { return sectors_.size(); }
    /// Total node count N = C * S.
    std::size_t size() const { return countries_.size() * sectors_.size(); }

    std::size_t node(std::size_t country_pos, std::size_t sector_pos) const;
    std::size_t country_of(std::size_t node) const { return node / sectors_.size(); }
    std::size_t sector_of(std::size_t node) const { return node % sectors_.size(); }

    const std::string& country_code(std::size_t pos) const { return countries_.at(pos); }
    const std::string& sector_code(std::size_t pos) const { return sectors_.at(pos); }
    const std::vector<std::string>& countries() const { return countries_; }
    const std::vector<std::string>& sectors() const { return sectors_; }

    std::optional<std::size_t> find_country(std::string_view code) const;
    std::optional<std::size_t> find_sector(std::string_view code) const;

    /// Resolve a code pair to a node id; throws SchemaError when unknown.
    std::size_t resolve(std::string_view country, std::string_view sector) const;

    /// "CCC:SEC" label for reports.
    std::string node_label(std::size_t node) const;

    bool operator==(const CountrySectorIndex& other) const {
        return countries_ == other.countries_ && sectors_ == other.sectors_;
    }

  private:
    std::vector<std::string> countries_;
    std::vector<std::string> sectors_;
    std::unordered_map<std::string, std::size_t> country_pos_;
    std::unordered_map<std::string, std::size_t> sector_pos_;
};

/// Incremental builder preserving first-appearance order of codes.
class IndexBuilder {
  public:
    void add_country(std::string_view code);
    void add_sector(std::string_view code);
    bool has_country(std::string_view code) const { return seen_countries_.count(std::string(code)) > 0; }
    bool has_sector(std::string_view code) const { return seen_sectors_.count(std::string(code)) > 0; }
    CountrySectorIndex build() const;

  private:
    std::vector<std::string> countries_;
    std::vector<std::string> sectors_;
    std::unordered_map<std::string, std::size_t> seen_countries_;
    std::unordered_map<std::string, std::size_t> seen_sectors_;
};

} // namespace vulnet
