#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "crspec/core/error.hpp"

namespace crspec::specfun {

// Largest argument accepted by the power series; I_nu(700) ~ 1e302.
inline constexpr double kBesselMaxArgument = 700.0;

/// Modified Bessel function I_nu(t) = sum_j (t/2)^{2j+nu} / (j! (j+nu)!),
/// summed until term/partial-sum < 1e-16.
inline double bessel_i(int nu, double t) {
    if (nu < 0) throw DomainError("bessel_i: order must be >= 0");
    if (t < 0.0) throw DomainError("bessel_i: t must be >= 0");
    if (t > kBesselMaxArgument) {
        throw RangeError("bessel_i: t = " + std::to_string(t) + " exceeds the series limit " +
                         std::to_string(kBesselMaxArgument) + "; use gamma_ratio/log_gamma");
    }
    if (t == 0.0) return nu == 0 ? 1.0 : 0.0;
    const double half = 0.5 * t;
    const double q = half * half;
    double term = std::exp(nu * std::log(half) - std::lgamma(nu + 1.0));
    double sum = term;
    for (int j = 1; j < 100000; ++j) {
        term *= q / (static_cast<double>(j) * (j + nu));
        sum += term;
        if (j > half && term < 1e-16 * sum) break;
    }
    return sum;
}

/// Even-n closed form sqrt(pi) Gamma((n-1)/2) (2/t)^{(n-2)/2} I_{(n-2)/2}(t),
/// evaluated as the reduced power series so that t = 0 is regular.
inline double gamma_even_series(int n, double t) {
    if (n < 2 || n % 2 != 0) throw DomainError("gamma_even_series: n must be even and >= 2");
    const int nu = (n - 2) / 2;
    const double at = std::abs(t);
    if (at > kBesselMaxArgument) throw RangeError("gamma_even_series: argument too large");
    const double q = 0.25 * at * at;
    double term = 1.0 / std::tgamma(nu + 1.0);
    double sum = term;
    for (int j = 1; j < 100000; ++j) {
        term *= q / (static_cast<double>(j) * (j + nu));
        sum += term;
        if (j > 0.5 * at && term < 1e-17 * sum) break;
    }
    return std::sqrt(std::numbers::pi) * std::tgamma(0.5 * (n - 1)) * sum;
}

/// Odd-n power series
///   gamma_n(t) = 2^{n-1} (h-1)! sum_j (h+j)! / (j! (n-1+2j)!) t^{2j},  h = (n-1)/2.
inline double gamma_odd_series(int n, double t) {
    if (n < 3 || n % 2 == 0) throw DomainError("gamma_odd_series: n must be odd and >= 3");
    const int h = (n - 1) / 2;
    const double t2 = t * t;
    double term = std::tgamma(h + 1.0) / std::tgamma(static_cast<double>(n));
    double sum = term;
    for (int j = 0; j < 100000; ++j) {
        term *= t2 * (h + j + 1.0) / ((j + 1.0) * (n + 2.0 * j) * (n + 2.0 * j + 1.0));
        sum += term;
        if (2.0 * j > std::abs(t) && term < 1e-17 * sum) break;
    }
    return std::ldexp(std::tgamma(static_cast<double>(h)), n - 1) * sum;
}

}  // namespace crspec::specfun
