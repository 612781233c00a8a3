#pragma once

#include <cstdint>
#include <iomanip>
#include <sstream>
#include <string>
#include <string_view>

namespace msmc {

/// Shortest decimal text that parses back to exactly `v`.
inline std::string format_double(double v) {
  for (int p = 1; p < 17; ++p) {
    std::ostringstream trial;
    trial << std::setprecision(p) << v;
    if (std::stod(trial.str()) == v) return trial.str();
  }
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

inline std::string format_fixed(double v, int decimals) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(decimals) << v;
  return os.str();
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << "0x" << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

inline constexpr std::string_view kVersion = "1.0.0";

}  // namespace msmc
