#pragma once

#include <cstdint>
#include <string_view>

namespace pulsecell {

inline constexpr std::string_view kVersion = "0.1.0";

// FNV-1a, used to stamp output files with a stable config fingerprint.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace pulsecell
