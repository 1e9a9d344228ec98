#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "crspec/core/error.hpp"
#include "crspec/core/summation.hpp"

namespace crspec::quad {

// Full list of n Gauss-Legendre nodes/weights on [-1,1], ascending.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    if (n < 1) throw DomainError("gauss_legendre: need at least one node");
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    if (n == 1) {
        w[0] = 2.0;
        return;
    }
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = z;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        const double wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
}

inline constexpr int kPanelOrder = 16;

struct PanelRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline const PanelRule& panel_rule() {
    static const PanelRule rule = [] {
        PanelRule r;
        gauss_legendre(kPanelOrder, r.nodes, r.weights);
        return r;
    }();
    return rule;
}

struct Tolerance {
    double relative = 1e-12;
    double absolute_floor = 1e-300;
    int max_depth = 48;
};

namespace detail {

template <class F>
double panel(const F& f, double a, double b) {
    const auto& rule = panel_rule();
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double s = 0.0;
    for (int i = 0; i < kPanelOrder; ++i) s += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return s * half;
}

template <class F>
void refine(const F& f, double a, double b, double whole, double tol, int depth, int max_depth,
            CompensatedSum& acc) {
    const double m = 0.5 * (a + b);
    const double left = panel(f, a, m);
    const double right = panel(f, m, b);
    const double split = left + right;
    if (std::abs(split - whole) <= tol || depth >= max_depth) {
        acc.add(left);
        acc.add(right);
        return;
    }
    refine(f, a, m, left, 0.5 * tol, depth + 1, max_depth, acc);
    refine(f, m, b, right, 0.5 * tol, depth + 1, max_depth, acc);
}

}  // namespace detail

// Adaptive 16-point Gauss-Legendre with interval bisection. A coarse pass over
// eight panels fixes the magnitude the relative tolerance is measured against.
template <class F>
double integrate(const F& f, double a, double b, const Tolerance& tol = {}) {
    if (!(b > a)) {
        if (a == b) return 0.0;
        return -integrate(f, b, a, tol);
    }
    constexpr int kCoarse = 8;
    std::array<double, kCoarse> coarse{};
    const double h = (b - a) / kCoarse;
    double magnitude = 0.0;
    for (int i = 0; i < kCoarse; ++i) {
        coarse[i] = detail::panel(f, a + i * h, a + (i + 1) * h);
        magnitude += std::abs(coarse[i]);
    }
    const double budget = std::max(tol.relative * magnitude, tol.absolute_floor);
    CompensatedSum acc;
    for (int i = 0; i < kCoarse; ++i) {
        detail::refine(f, a + i * h, a + (i + 1) * h, coarse[i], budget / kCoarse, 0, tol.max_depth,
                       acc);
    }
    return acc.value();
}

}  // namespace crspec::quad
