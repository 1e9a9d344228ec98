#pragma once

// Independent reference computations used by the acceptance suite. Each one
// avoids the code path it is checking.

#include <cmath>
#include <cstdint>
#include <vector>

#include "crspec/core/summation.hpp"
#include "crspec/specfun/bump.hpp"

namespace crspec::oracles {

/// Ordered representations of N as a sum of n squares, N = 0..max_sq, by
/// direct enumeration of the cube |m_i| <= sqrt(max_sq). n in {1, 2, 3}.
inline std::vector<std::int64_t> brute_force_shell_counts(int n, std::int64_t max_sq) {
    std::vector<std::int64_t> c(static_cast<std::size_t>(max_sq) + 1, 0);
    std::int64_t r = 0;
    while ((r + 1) * (r + 1) <= max_sq) ++r;
    if (n == 1) {
        for (std::int64_t a = -r; a <= r; ++a) ++c[a * a];
    } else if (n == 2) {
        for (std::int64_t a = -r; a <= r; ++a)
            for (std::int64_t b = -r; b <= r; ++b) {
                const std::int64_t s = a * a + b * b;
                if (s <= max_sq) ++c[s];
            }
    } else {
        for (std::int64_t a = -r; a <= r; ++a)
            for (std::int64_t b = -r; b <= r; ++b)
                for (std::int64_t e = -r; e <= r; ++e) {
                    const std::int64_t s = a * a + b * b + e * e;
                    if (s <= max_sq) ++c[s];
                }
    }
    return c;
}

/// Euler-Maclaurin for sum_{m >= 1} (m + 1) chi(m / k) with chi smooth and
/// compactly supported in (0, inf): all boundary terms vanish, so the sum is
/// k^2 int t chi + k int chi up to O(k^-inf). Returns the k^1 coefficient
/// int chi, the limit of (Tr chi_k - k^2 int t chi) / k on CP^1.
inline double cp1_subleading_coefficient(const BumpFunction& chi) {
    // composite Simpson on 2^14 panels, independent of the adaptive rule
    const int panels = 1 << 14;
    const double a = chi.delta1(), b = chi.delta2();
    const double h = (b - a) / panels;
    CompensatedSum s;
    for (int i = 0; i <= panels; ++i) {
        const double w = (i == 0 || i == panels) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        s.add(w * chi(a + i * h));
    }
    return s.value() * h / 3.0;
}

}  // namespace crspec::oracles
