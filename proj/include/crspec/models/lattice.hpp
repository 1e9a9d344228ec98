#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "crspec/core/error.hpp"

namespace crspec {

struct ResourceBudget {
    std::size_t max_bytes = std::size_t{3} << 29;  // 1.5 GiB
    std::size_t max_modes = 60'000'000;
};

struct LatticeShell {
    std::int64_t norm_sq = 0;
    std::int64_t count = 0;
    // Eigenvalue attached by a model; NaN from the model-free lattice_shells().
    double lambda = std::numeric_limits<double>::quiet_NaN();
};

// Largest integer N with N <= r^2, tolerant of r = sqrt(N) round-off.
inline std::int64_t max_norm_sq_for(double max_norm) {
    if (!(max_norm > 0.0)) throw ValidationError("max_norm must be > 0");
    const double r2 = max_norm * max_norm;
    if (r2 > 9.0e15) throw ResourceError("max_norm^2 exceeds the exact integer range");
    return static_cast<std::int64_t>(std::floor(r2 * (1.0 + 4e-16) + 1e-12));
}

/// r_n(N) for N = 0..max_norm_sq: the number of ordered representations of N
/// as a sum of n integer squares, by repeated convolution r_n = r_{n-1} * r_1.
inline std::vector<std::int64_t> sum_of_squares_counts(int n, std::int64_t max_norm_sq,
                                                       const ResourceBudget& budget = {}) {
    if (n < 1) throw DomainError("sum_of_squares_counts: n must be >= 1");
    if (max_norm_sq < 0) throw DomainError("sum_of_squares_counts: negative norm");
    const std::size_t len = static_cast<std::size_t>(max_norm_sq) + 1;
    const std::size_t bytes = 2 * len * sizeof(std::int64_t);
    if (bytes > budget.max_bytes) {
        throw ResourceError("lattice shell table needs " + std::to_string(bytes) +
                            " bytes, budget is " + std::to_string(budget.max_bytes));
    }
    std::vector<std::int64_t> r(len, 0);
    r[0] = 1;
    std::vector<std::int64_t> next(len);
    for (int dim = 1; dim <= n; ++dim) {
        next = r;  // j = 0 term
        for (std::int64_t j = 1; j * j <= max_norm_sq; ++j) {
            const std::int64_t sq = j * j;
            for (std::int64_t N = sq; N <= max_norm_sq; ++N) next[N] += 2 * r[N - sq];
        }
        r.swap(next);
    }
    return r;
}

/// Shells 1 <= N <= max_norm^2 with a nonzero representation count.
inline std::vector<LatticeShell> lattice_shells(int n, double max_norm,
                                                const ResourceBudget& budget = {}) {
    if (n < 1) throw DomainError("lattice_shells: n must be >= 1");
    const std::int64_t max_sq = max_norm_sq_for(max_norm);
    const auto counts = sum_of_squares_counts(n, max_sq, budget);
    std::vector<LatticeShell> shells;
    for (std::int64_t N = 1; N <= max_sq; ++N) {
        if (counts[N] > 0) shells.push_back({N, counts[N]});
    }
    return shells;
}

}  // namespace crspec
