#pragma once

#include <cmath>

// absolute-tolerance comparison; doctest's Approx is relative-only
inline bool near_abs(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

inline bool near_rel(double a, double b, double rel) {
    const double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
    return std::fabs(a - b) <= rel * scale;
}
