#pragma once

#include <cstdio>
#include <string>

namespace geomon {

/// printf-shaped double, for deterministic text output.
inline std::string fmt_double(double v, int precision = 6) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
    return buf;
}

/// Shortest round-trip representation.
inline std::string fmt_double_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace geomon
