#include "vulnet/detail/digest.hpp"

#include "vulnet/errors.hpp"

#include <cstdio>
#include <fstream>
#include <vector>

namespace vulnet::detail {

void Fnv1a::update(const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    std::uint64_t h = state_;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= bytes[i];
        h *= 1099511628211ull;
    }
    state_ = h;
}

std::string Fnv1a::hex() const {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(state_));
    return std::string(buf, 16);
}

std::string file_digest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open file: " + path.string());
    }
    Fnv1a hash;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        hash.update(buf, static_cast<std::size_t>(in.gcount()));
    }
    return hash.hex();
}

std::string combine_digests(const std::vector<std::string>& digests) {
    Fnv1a hash;
    for (const auto& d : digests) {
        hash.update(d);
        hash.update("|");
    }
    return hash.hex().substr(0, 12);
}

} // namespace vulnet::detail
