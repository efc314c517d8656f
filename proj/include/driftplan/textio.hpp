#pragma once

#include <cstdio>
#include <string>

namespace driftplan {

/// Shortest decimal form that round-trips an IEEE double exactly.
inline std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace driftplan
