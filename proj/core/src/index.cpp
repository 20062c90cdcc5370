#include "vulnet/index.hpp"

#include "vulnet/errors.hpp"

namespace vulnet {

CountrySectorIndex::CountrySectorIndex(std::vector<std::string> countries,
                                       std::vector<std::string> sectors)
    : countries_(std::move(countries)), sectors_(std::move(sectors)) {
    country_pos_.reserve(countries_.size());
    for (std::size_t i = 0; i < countries_.size(); ++i) {
        auto [it, inserted] = country_pos_.emplace(countries_[i], i);
        if (!inserted) {
            throw ArgumentError("duplicate country code '" + countries_[i] + "' in index");
        }
    }
    sector_pos_.reserve(sectors_.size());
    for (std::size_t i = 0; i < sectors_.size(); ++i) {
        auto [it, inserted] = sector_pos_.emplace(sectors_[i], i);
        if (!inserted) {
            throw ArgumentError("duplicate sector code '" + sectors_[i] + "' in index");
        }
    }
}

std::size_t CountrySectorIndex::node(std::size_t country_pos, std::size_t sector_pos) const {
    if (country_pos >= countries_.size() || sector_pos >= sectors_.size()) {
        throw ArgumentError("country/sector position out of range");
    }
    return country_pos * sectors_.size() + sector_pos;
}

std::optional<std::size_t> CountrySectorIndex::find_country(std::string_view code) const {
    auto it = country_pos_.find(std::string(code));
    if (it == country_pos_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> CountrySectorIndex::find_sector(std::string_view code) const {
    auto it = sector_pos_.find(std::string(code));
    if (it == sector_pos_.end()) return std::nullopt;
    return it->second;
}

std::size_t CountrySectorIndex::resolve(std::string_view country, std::string_view sector) const {
    auto c = find_country(country);
    if (!c) throw SchemaError("unknown country code '" + std::string(country) + "'");
    auto s = find_sector(sector);
    if (!s) throw SchemaError("unknown sector code '" + std::string(sector) + "'");
    return node(*c, *s);
}

std::string CountrySectorIndex::node_label(std::size_t n) const {
    return countries_.at(country_of(n)) + ":" + sectors_.at(sector_of(n));
}

void IndexBuilder::add_country(std::string_view code) {
    std::string key(code);
    if (seen_countries_.emplace(key, countries_.size()).second) {
        countries_.push_back(std::move(key));
    }
}

void IndexBuilder::add_sector(std::string_view code) {
    std::string key(code);
    if (seen_sectors_.emplace(key, sectors_.size()).second) {
        sectors_.push_back(std::move(key));
    }
}

CountrySectorIndex IndexBuilder::build() const {
    return CountrySectorIndex(countries_, sectors_);
}

} // namespace vulnet
