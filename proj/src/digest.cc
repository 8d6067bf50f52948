#include "ittmbb/digest.h"

#include <cstdio>

namespace ittmbb {

std::string HexDigest(uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace ittmbb
