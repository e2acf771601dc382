#pragma once

namespace gslms {
inline constexpr const char* kVersion = "0.1.0";
} // namespace gslms
