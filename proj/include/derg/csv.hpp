#pragma once

#include <cstdio>
#include <ostream>
#include <string>

#include "derg/simulate.hpp"

namespace derg {

// Full double precision, locale-independent; identical inputs give identical
// bytes.
inline std::string format_double(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

// Header `t,x1..xn,v1..vm,kappa,dsm,min_c`, one row per governor sample,
// LF line endings.
inline void write_run_csv(std::ostream& os, const RunLog& log) {
    if (log.rows.empty()) return;
    const auto n = log.rows.front().x.size();
    const auto m = log.rows.front().v.size();
    os << "t";
    for (int i = 1; i <= n; ++i) os << ",x" << i;
    for (int i = 1; i <= m; ++i) os << ",v" << i;
    os << ",kappa,dsm,min_c\n";
    for (const auto& row : log.rows) {
        os << format_double(row.t);
        for (int i = 0; i < n; ++i) os << ',' << format_double(row.x(i));
        for (int i = 0; i < m; ++i) os << ',' << format_double(row.v(i));
        os << ',' << format_double(row.kappa) << ',' << format_double(row.dsm) << ','
           << format_double(row.min_c) << '\n';
    }
}

}  // namespace derg
