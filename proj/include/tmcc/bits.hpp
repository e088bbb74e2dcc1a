#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tmcc {

/// One element per bit, each 0 or 1.
using Bits = std::vector<std::uint8_t>;

inline std::string to_string(const Bits& bits) {
  std::string out;
  out.reserve(bits.size());
  for (auto b : bits) out.push_back(b ? '1' : '0');
  return out;
}

}  // namespace tmcc
