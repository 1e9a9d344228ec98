#pragma once

#include <cmath>
#include <complex>
#include <limits>

namespace crspec {

// Neumaier's variant of Kahan summation. Order of add() calls fixes the result
// bit-for-bit, which is what the deterministic reductions rely on.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }

    CompensatedSum& operator+=(double x) noexcept {
        add(x);
        return *this;
    }

    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

class CompensatedComplexSum {
public:
    void add(std::complex<double> z) noexcept {
        re_.add(z.real());
        im_.add(z.imag());
    }

    std::complex<double> value() const noexcept { return {re_.value(), im_.value()}; }

private:
    CompensatedSum re_;
    CompensatedSum im_;
};

// A sum represented as mantissa * exp(log_scale). Mode sums on the torus model
// span hundreds of orders of magnitude, so terms are accumulated relative to
// the largest exponent seen in a first pass.
template <class T>
struct ScaledValue {
    double log_scale = -std::numeric_limits<double>::infinity();
    T mantissa{};

    T value() const {
        if (mantissa == T{}) return T{};
        return mantissa * std::exp(log_scale);
    }
};

// Terms whose log-magnitude sits this far below the running maximum are below
// 1e-34 of the leading term and are skipped.
inline constexpr double kNegligibleLogRatio = -78.0;

}  // namespace crspec
