#pragma once

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "crspec/core/error.hpp"
#include "crspec/core/series.hpp"

namespace crspec {

// 17 significant digits, '.' decimal separator regardless of locale
// (snprintf honours LC_NUMERIC, and nothing in this library changes it).
inline std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void write_series_csv(std::ostream& os, const Series& series) {
    os << "k,value\n";
    for (const auto& p : series) os << format_g17(p.k) << ',' << format_g17(p.value) << '\n';
}

/// Reads a `k,value` CSV (header required).
inline Series read_series_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ValidationError("series CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "k,value") throw ValidationError("series CSV header must be 'k,value'");
    Series out;
    std::size_t row = 1;
    while (std::getline(is, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ValidationError("series CSV row " + std::to_string(row) + " has no comma");
        try {
            std::size_t a = 0, b = 0;
            const std::string ks = line.substr(0, comma), vs = line.substr(comma + 1);
            const double k = std::stod(ks, &a);
            const double v = std::stod(vs, &b);
            if (a != ks.size() || b != vs.size()) throw std::invalid_argument(line);
            out.push_back({k, v});
        } catch (const std::logic_error&) {
            throw ValidationError("series CSV row " + std::to_string(row) + " is not numeric");
        }
    }
    return out;
}

inline constexpr const char* kVersion = "crspec 0.1.0";

}  // namespace crspec
