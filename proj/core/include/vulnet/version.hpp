#pragma once

namespace vulnet {

inline constexpr const char* kVersion = "0.1.0";

} // namespace vulnet
