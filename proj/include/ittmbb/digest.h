#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace ittmbb {

// 64-bit FNV-1a; stable across platforms, used for tape digests in ledgers.
inline uint64_t Fnv1a64(std::string_view data, uint64_t seed = 0xcbf29ce484222325ULL) {
  uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string HexDigest(uint64_t value);

}  // namespace ittmbb
