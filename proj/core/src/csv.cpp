#include "vulnet/detail/csv.hpp"

#include "vulnet/errors.hpp"

#include <cstdio>
#include <cstdlib>

namespace vulnet::detail {

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
    if (!line.empty() && line.back() == '\r') {
        line.remove_suffix(1);
    }
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

bool parse_double(std::string_view field, double& out) {
    if (field.empty()) return false;
    // strtod needs a terminated buffer; fields are short.
    char buf[64];
    if (field.size() >= sizeof(buf)) return false;
    field.copy(buf, field.size());
    buf[field.size()] = '\0';
    char* end = nullptr;
    out = std::strtod(buf, &end);
    return end == buf + field.size();
}

std::string format_double(double v) {
    char buf[40];
    int n = std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf, static_cast<std::size_t>(n));
}

LineReader::LineReader(const std::filesystem::path& path) : path_(path), in_(path) {
    if (!in_) {
        throw ParseError("cannot open file: " + path.string());
    }
}

bool LineReader::next(std::string& line) {
    if (!std::getline(in_, line)) return false;
    ++line_number_;
    return true;
}

} // namespace vulnet::detail
