#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace vulnet::detail {

/// Splits one delimited line into fields. No quoting: the interchange
/// formats carry plain codes and numbers only. A trailing '\r' is stripped.
std::vector<std::string_view> split_fields(std::string_view line, char sep = ',');

/// Parses a double, requiring the whole field to be consumed.
/// Returns false on malformed input.
bool parse_double(std::string_view field, double& out);

/// Formats a double with 17 significant digits so that re-parsing
/// reproduces the value bit for bit.
std::string format_double(double v);

/// Line reader that tracks the 1-based line number for error messages.
class LineReader {
  public:
    explicit LineReader(const std::filesystem::path& path);

    bool next(std::string& line);
    std::size_t line_number() const { return line_number_; }
    const std::filesystem::path& path() const { return path_; }

  private:
    std::filesystem::path path_;
    std::ifstream in_;
    std::size_t line_number_ = 0;
};

} // namespace vulnet::detail
