#pragma once

// Circle bundle of a positive line bundle L over a compact Kahler manifold M.
// The Toeplitz operator of the circle action has eigenvalue m with
// multiplicity dim H^0(M, L^m), a Hilbert polynomial in m for m >= 1.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "crspec/core/error.hpp"
#include "crspec/models/model_spectrum.hpp"

namespace crspec {

// Exact rational with a positive denominator. 128-bit intermediates keep
// polynomial evaluation exact for the m ranges used here.
struct Rational {
    __int128 num = 0;
    __int128 den = 1;

    Rational() = default;
    Rational(std::int64_t n) : num(n), den(1) {}  // NOLINT(google-explicit-constructor)
    Rational(__int128 n, __int128 d) : num(n), den(d) {
        if (d == 0) throw ValidationError("rational with zero denominator");
        normalize();
    }

    void normalize() {
        if (den < 0) {
            num = -num;
            den = -den;
        }
        const __int128 g = gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    bool is_integer() const { return den == 1; }
    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return {a.num * b.den + b.num * a.den, a.den * b.den};
    }
    friend Rational operator*(const Rational& a, const Rational& b) { return {a.num * b.num, a.den * b.den}; }

private:
    static __int128 gcd(__int128 a, __int128 b) {
        while (b != 0) {
            const __int128 r = a % b;
            a = b;
            b = r;
        }
        return a;
    }
};

// Parse "p" or "p/q".
inline Rational parse_rational(const std::string& s) {
    const auto slash = s.find('/');
    try {
        std::size_t used = 0;
        if (slash == std::string::npos) {
            const long long v = std::stoll(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return Rational(static_cast<std::int64_t>(v));
        }
        const long long p = std::stoll(s.substr(0, slash), &used);
        if (used != slash) throw std::invalid_argument(s);
        const std::string rest = s.substr(slash + 1);
        const long long q = std::stoll(rest, &used);
        if (used != rest.size()) throw std::invalid_argument(s);
        return Rational(static_cast<__int128>(p), static_cast<__int128>(q));
    } catch (const std::logic_error&) {
        throw ValidationError("not a rational number: '" + s + "'");
    }
}

class CircleBundleModel final : public ModelSpectrum {
public:
    // coeffs[i] multiplies m^i; the degree fixes the CR dimension.
    CircleBundleModel(int d, std::vector<Rational> coeffs, std::string label = "circle-bundle")
        : d_(d), coeffs_(std::move(coeffs)), label_(std::move(label)) {
        if (d < 1) throw ValidationError("model.d must be >= 1");
        if (static_cast<int>(coeffs_.size()) != d + 1) {
            throw ValidationError("model.hilbert_coeffs must have d + 1 = " + std::to_string(d + 1) + " entries");
        }
        if (coeffs_.back().num <= 0) throw ModelValidityError("leading Hilbert coefficient must be positive");
    }

    int cr_dimension() const override { return d_; }
    std::string name() const override { return label_ + "(d=" + std::to_string(d_) + ")"; }
    const std::vector<Rational>& coefficients() const noexcept { return coeffs_; }

    std::int64_t hilbert_multiplicity(std::int64_t m) const {
        if (m < 1) throw ValidationError("hilbert_multiplicity: m must be >= 1");
        Rational acc;
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * Rational(m) + *it;
        if (!acc.is_integer() || acc.num <= 0) {
            throw ModelValidityError("Hilbert polynomial is not a positive integer at m = " + std::to_string(m));
        }
        return static_cast<std::int64_t>(acc.num);
    }

    std::vector<SpectralLine> spectrum_up_to(double cutoff) const override {
        if (!(cutoff > 0.0)) throw ValidationError("spectrum cutoff must be > 0");
        std::vector<SpectralLine> lines;
        const auto top = static_cast<std::int64_t>(std::floor(cutoff));
        for (std::int64_t m = 1; m <= top; ++m) lines.push_back({static_cast<double>(m), hilbert_multiplicity(m)});
        return lines;
    }

    /// Leading Hilbert coefficient c_d: sum_m mult(m) chi(m/k) ~ c_d k^{d+1} int t^d chi.
    std::optional<double> limit_constant() const override { return coeffs_.back().to_double(); }

private:
    int d_;
    std::vector<Rational> coeffs_;
    std::string label_;
};

/// CP^d with O(1): multiplicity binom(m + d, d).
inline CircleBundleModel projective_space(int d) {
    if (d < 1) throw ValidationError("projective_space: d must be >= 1");
    // binom(m + d, d) = prod_{j=1..d} (m + j) / d!, expanded into monomials.
    std::vector<__int128> poly{1};
    __int128 fact = 1;
    for (int j = 1; j <= d; ++j) {
        std::vector<__int128> next(poly.size() + 1, 0);
        for (std::size_t i = 0; i < poly.size(); ++i) {
            next[i] += poly[i] * j;
            next[i + 1] += poly[i];
        }
        poly = std::move(next);
        fact *= j;
    }
    std::vector<Rational> coeffs;
    for (__int128 c : poly) coeffs.emplace_back(c, fact);
    return CircleBundleModel(d, std::move(coeffs), "CP^" + std::to_string(d));
}

}  // namespace crspec
