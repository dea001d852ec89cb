#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace pgeig {

/// 17 significant digits, enough to round-trip a double.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace pgeig
