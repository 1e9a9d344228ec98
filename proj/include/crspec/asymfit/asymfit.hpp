#pragma once

// Power-law fits, Richardson extrapolation and convergence-order estimates for
// (k, value) series.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "crspec/core/error.hpp"
#include "crspec/core/series.hpp"

namespace crspec::asymfit {

struct FitResult {
    double exponent = 0.0;
    double coefficient = 0.0;
    double r_squared = 0.0;
    std::vector<double> residuals;  // v_i / (coefficient k_i^exponent) - 1
};

/// Least squares of log v against log k: v ~ coefficient * k^exponent.
inline FitResult fit_power(const Series& series) {
    if (series.size() < 3) throw DomainError("fit_power: needs at least 3 points");
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (!(series[i].k > 0.0)) throw DomainError("fit_power: k must be > 0");
        if (!(series[i].value > 0.0)) throw DomainError("fit_power: values must be > 0 (fit |v| or shift)");
        if (i > 0 && !(series[i].k > series[i - 1].k)) throw DomainError("fit_power: k must be strictly increasing");
    }
    const double n = static_cast<double>(series.size());
    double mx = 0.0, my = 0.0;
    for (const auto& p : series) {
        mx += std::log(p.k);
        my += std::log(p.value);
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& p : series) {
        const double dx = std::log(p.k) - mx, dy = std::log(p.value) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    FitResult r;
    r.exponent = sxy / sxx;
    const double intercept = my - r.exponent * mx;
    r.coefficient = std::exp(intercept);
    double sse = 0.0;
    for (const auto& p : series) {
        const double e = std::log(p.value) - (intercept + r.exponent * std::log(p.k));
        sse += e * e;
        r.residuals.push_back(std::expm1(e));
    }
    r.r_squared = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;
    return r;
}

/// Limit of v_k = L + C k^{-p} + ..., eliminating C between consecutive points;
/// returns the extrapolant from the last pair.
inline double richardson(const Series& series, double order) {
    if (series.size() < 2) throw DomainError("richardson: needs at least 2 points");
    if (!(order > 0.0)) throw DomainError("richardson: order must be > 0");
    double last = 0.0;
    for (std::size_t i = 1; i < series.size(); ++i) {
        const auto& a = series[i - 1];
        const auto& b = series[i];
        if (a.k == b.k) throw DomainError("richardson: identical k values");
        if (!(b.k / a.k >= 1.5)) throw DomainError("richardson: consecutive k ratio must be >= 1.5");
        const double q = std::pow(b.k / a.k, order);
        last = (q * b.value - a.value) / (q - 1.0);
    }
    return last;
}

/// Convergence order p of v_k -> L from three consecutive points of a geometric
/// ladder: p = log(|v1 - v0| / |v2 - v1|) / log(ratio). The last triple is used.
/// Returns +infinity when the differences vanish.
inline double order_estimate(const Series& series) {
    if (series.size() < 3) throw DomainError("order_estimate: needs at least 3 points");
    const double ratio = series[1].k / series[0].k;
    if (!(ratio > 1.0)) throw DomainError("order_estimate: k must be increasing");
    for (std::size_t i = 1; i < series.size(); ++i) {
        const double ri = series[i].k / series[i - 1].k;
        if (std::abs(ri - ratio) > 1e-9 * ratio) throw DomainError("order_estimate: k spacing is not geometric");
    }
    const std::size_t m = series.size();
    const double d1 = std::abs(series[m - 2].value - series[m - 3].value);
    const double d2 = std::abs(series[m - 1].value - series[m - 2].value);
    if (d2 == 0.0) return std::numeric_limits<double>::infinity();
    if (d1 == 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(d1 / d2) / std::log(ratio);
}

}  // namespace crspec::asymfit
