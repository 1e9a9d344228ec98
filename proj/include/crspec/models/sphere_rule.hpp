#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "crspec/core/error.hpp"
#include "crspec/specfun/quadrature.hpp"

namespace crspec {

// Quadrature on the unit sphere S^{n-1} in R^n. Nodes are unit vectors stored
// row-major (n doubles each); weights sum to vol(S^{n-1}).
struct SphereRule {
    int n = 0;
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const noexcept { return weights.size(); }
    const double* node(std::size_t i) const noexcept { return nodes.data() + i * n; }
};

/// n = 2: uniform trapezoid on the circle with `points` nodes.
/// n = 3: `points` Gauss-Legendre nodes in z times 2*`points` trapezoid nodes in azimuth.
/// Both are spectrally accurate for the analytic integrands used here.
inline SphereRule sphere_rule(int n, int points) {
    if (points < 1) throw ValidationError("sphere rule needs at least one node");
    SphereRule rule;
    rule.n = n;
    if (n == 2) {
        const double h = 2.0 * std::numbers::pi / points;
        for (int i = 0; i < points; ++i) {
            rule.nodes.push_back(std::cos(i * h));
            rule.nodes.push_back(std::sin(i * h));
            rule.weights.push_back(h);
        }
        return rule;
    }
    if (n == 3) {
        std::vector<double> z, wz;
        quad::gauss_legendre(points, z, wz);
        const int naz = 2 * points;
        const double h = 2.0 * std::numbers::pi / naz;
        for (int i = 0; i < points; ++i) {
            const double r = std::sqrt(std::max(0.0, 1.0 - z[i] * z[i]));
            for (int j = 0; j < naz; ++j) {
                rule.nodes.push_back(r * std::cos(j * h));
                rule.nodes.push_back(r * std::sin(j * h));
                rule.nodes.push_back(z[i]);
                rule.weights.push_back(wz[i] * h);
            }
        }
        return rule;
    }
    throw ValidationError("sphere quadrature supports n = 2 and n = 3 only (got n = " +
                          std::to_string(n) + ")");
}

}  // namespace crspec
