#pragma once

#include <cstdio>
#include <string>

namespace metawave {

/// Fixed 17-significant-digit rendering, identical across runs.
inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

} // namespace metawave
