#pragma once

// The gamma_n family on the Grauert tube over a torus:
//
//     gamma_n(t) = int_0^pi exp(t cos a) sin^{n-2}(a) da,   n >= 2.
//
// Everything is evaluated through the scaled integrand
//     w(a) = exp(-2 t sin^2(a/2)) sin^{n-2}(a) = exp(t (cos a - 1)) sin^{n-2}(a),
// which never exceeds 1, with the factor exp(t) tracked in log space. The
// derivative is taken under the integral sign: gamma_n' inserts cos(a).

#include <cmath>
#include <numbers>
#include <string>

#include "crspec/core/error.hpp"
#include "crspec/specfun/quadrature.hpp"

namespace crspec::specfun {

// gamma() refuses arguments above this; exp(700) * pi is still finite.
inline constexpr double kGammaMaxArgument = 700.0;

// Scaled integrals for one (n, t): the mass of w and the mass of (1 - cos a) w.
struct GammaMoments {
    double scaled = 0.0;
    double one_minus_cos = 0.0;
};

namespace detail {

inline void require_order(int n, const char* op) {
    if (n < 2) throw DomainError(std::string(op) + ": order n must be >= 2, got " + std::to_string(n));
}

inline double scaled_weight(int n, double t, double a) {
    const double s = std::sin(0.5 * a);
    const double w = std::exp(-2.0 * t * s * s);
    switch (n) {
        case 2: return w;
        case 3: return w * std::sin(a);
        default: return w * std::pow(std::sin(a), n - 2);
    }
}

// Beyond this angle exp(t (cos a - 1)) < 1e-300, the absolute quadrature floor.
inline double support_end(double t) {
    constexpr double kLogFloor = 690.0;
    if (t <= 0.5 * kLogFloor) return std::numbers::pi;
    return 2.0 * std::asin(std::sqrt(0.5 * kLogFloor / t));
}

}  // namespace detail

inline GammaMoments gamma_moments(int n, double t) {
    detail::require_order(n, "gamma_moments");
    if (t < 0.0) throw DomainError("gamma_moments: t must be >= 0");
    const double end = detail::support_end(t);
    GammaMoments m;
    m.scaled = quad::integrate([&](double a) { return detail::scaled_weight(n, t, a); }, 0.0, end);
    m.one_minus_cos = quad::integrate(
        [&](double a) {
            const double s = std::sin(0.5 * a);
            return 2.0 * s * s * detail::scaled_weight(n, t, a);
        },
        0.0, end);
    return m;
}

/// log gamma_n(t) for t >= 0, finite for every finite t.
inline double log_gamma(int n, double t) {
    detail::require_order(n, "log_gamma");
    if (t < 0.0) throw DomainError("log_gamma: t must be >= 0");
    const double end = detail::support_end(t);
    const double scaled =
        quad::integrate([&](double a) { return detail::scaled_weight(n, t, a); }, 0.0, end);
    return t + std::log(scaled);
}

/// gamma_n(t). gamma_n is even in t. Throws RangeError for |t| above
/// kGammaMaxArgument; use log_gamma or gamma_ratio there.
inline double gamma(int n, double t) {
    detail::require_order(n, "gamma");
    const double at = std::abs(t);
    if (at > kGammaMaxArgument) {
        throw RangeError("gamma: |t| = " + std::to_string(at) + " exceeds " +
                         std::to_string(kGammaMaxArgument) + "; use log_gamma or gamma_ratio");
    }
    const double end = detail::support_end(at);
    const double scaled =
        quad::integrate([&](double a) { return detail::scaled_weight(n, at, a); }, 0.0, end);
    return std::exp(at) * scaled;
}

/// gamma_n'(t) / gamma_n(t) for t >= 0, computed as 1 - <1 - cos a> so that the
/// approach to 1 keeps full relative precision in 1 - ratio.
inline double gamma_ratio(int n, double t) {
    detail::require_order(n, "gamma_ratio");
    if (t < 0.0) throw DomainError("gamma_ratio: t must be >= 0");
    const GammaMoments m = gamma_moments(n, t);
    return 1.0 - m.one_minus_cos / m.scaled;
}

/// gamma_n'(t), odd in t.
inline double gamma_prime(int n, double t) {
    const double at = std::abs(t);
    const double v = gamma_ratio(n, at) * gamma(n, at);
    return t < 0.0 ? -v : v;
}

/// Surface measure of the unit j-sphere in R^{j+1}.
inline double sphere_volume(int j) {
    if (j < 0) throw DomainError("sphere_volume: dimension must be >= 0");
    const double h = 0.5 * (j + 1);
    return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

}  // namespace crspec::specfun
