#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace matinar {

inline constexpr std::string_view kVersion = "0.1.0";

/// FNV-1a 64-bit hash, hex-encoded; used to fingerprint run configurations.
std::string fnv1a_hex(std::string_view text);

}  // namespace matinar
