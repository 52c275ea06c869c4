#pragma once

#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <string>
#include <vector>

#include "qghjm/errors.hpp"

namespace qghjm {
namespace io {

// Shortest decimal form that round-trips exactly through strtod; 17
// significant digits always suffice, fewer are used when they already
// reproduce the value (0.05 prints as "0.05", not "0.050000000000000003").
inline std::string fmt17(double x) {
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x) break;
    }
    return buf;
}

inline double parse17(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str()) throw InvalidArgument("parse17: not a number: " + s);
    return v;
}

// Column-major CSV: columns[j] is one column, all the same length.
inline void write_csv(std::ostream& os, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& columns) {
    if (header.size() != columns.size())
        throw InvalidArgument("write_csv: header/column count mismatch");
    for (size_t j = 0; j < header.size(); ++j)
        os << (j ? "," : "") << header[j];
    os << '\n';
    if (columns.empty()) return;
    const size_t n = columns[0].size();
    for (const auto& c : columns)
        if (c.size() != n) throw InvalidArgument("write_csv: ragged columns");
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < columns.size(); ++j)
            os << (j ? "," : "") << fmt17(columns[j][i]);
        os << '\n';
    }
}

} // namespace io
} // namespace qghjm
