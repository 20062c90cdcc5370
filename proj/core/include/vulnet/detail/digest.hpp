#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace vulnet::detail {

/// 64-bit FNV-1a running hash.
class Fnv1a {
  public:
    void update(const void* data, std::size_t len);
    void update(std::string_view s) { update(s.data(), s.size()); }
    std::uint64_t value() const { return state_; }
    /// 16 lowercase hex characters.
    std::string hex() const;

  private:
    std::uint64_t state_ = 0xcbf29ce484222325ull;
};

/// Digest of a file's bytes; throws ParseError when unreadable.
std::string file_digest(const std::filesystem::path& path);

/// Combines several hex digests into one short id for file names.
std::string combine_digests(const std::vector<std::string>& digests);

} // namespace vulnet::detail
