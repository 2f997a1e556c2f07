#pragma once

#include <cstdio>
#include <string>

namespace tyc::detail {

// 17 significant digits: enough to round-trip any double.
inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace tyc::detail
