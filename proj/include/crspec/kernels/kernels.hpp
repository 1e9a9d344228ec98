#pragma once

// chi_k(T_P)(p, q) = sum_m w_m f_m(p) conj(f_m(q)) on the torus model, evaluated
// as an exact finite mode sum. Every sum runs in two passes: the first finds the
// largest log-magnitude, the second accumulates terms relative to it.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "crspec/core/error.hpp"
#include "crspec/core/series.hpp"
#include "crspec/core/summation.hpp"
#include "crspec/kernels/mode_frame.hpp"
#include "crspec/models/sphere_rule.hpp"
#include "crspec/spectral/spectral.hpp"

namespace crspec::kernels {

namespace detail {

// e^{i v x} for v = -M..M, each from its own polar() call.
inline std::vector<std::complex<double>> phase_table(int max_abs, double x) {
    std::vector<std::complex<double>> t(2 * max_abs + 1);
    for (int v = -max_abs; v <= max_abs; ++v) t[v + max_abs] = std::polar(1.0, v * x);
    return t;
}

inline std::vector<double> log_terms(const ModeFrame& frame, const double* ysum, double& max_out) {
    std::vector<double> e(frame.size());
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < frame.size(); ++i) {
        e[i] = frame.shell(i).log_term - frame.dot(i, ysum);
        mx = std::max(mx, e[i]);
    }
    max_out = mx;
    return e;
}

}  // namespace detail

/// K sums sum_m w_m |f_m(p)|^2 g_j(m) at once, g returning std::array<double, K>
/// for a mode index.
template <std::size_t K, class G>
std::array<double, K> diag_moments(const ModeFrame& frame, const PointX& p, G&& g) {
    frame.model().check_point(p);
    std::array<double, K> out{};
    if (frame.empty()) return out;
    std::vector<double> ysum(p.y.size());
    for (std::size_t j = 0; j < ysum.size(); ++j) ysum[j] = 2.0 * p.y[j];
    double mx = 0.0;
    const auto e = detail::log_terms(frame, ysum.data(), mx);
    if (!std::isfinite(mx)) return out;
    std::array<CompensatedSum, K> acc;
    for (std::size_t i = 0; i < frame.size(); ++i) {
        const double rel = e[i] - mx;
        if (rel < kNegligibleLogRatio) continue;
        const double base = std::exp(rel);
        const std::array<double, K> gi = g(i);
        for (std::size_t j = 0; j < K; ++j) acc[j].add(base * gi[j]);
    }
    const double scale = std::exp(mx);
    for (std::size_t j = 0; j < K; ++j) out[j] = acc[j].value() * scale;
    return out;
}

/// chi_k(T_P)(p, q).
inline std::complex<double> kernel_eval(const ModeFrame& frame, const PointX& p, const PointX& q) {
    frame.model().check_point(p);
    frame.model().check_point(q);
    if (frame.empty()) return {0.0, 0.0};
    const int n = frame.n();
    std::vector<double> ysum(n);
    for (int j = 0; j < n; ++j) ysum[j] = p.y[j] + q.y[j];
    double mx = 0.0;
    const auto e = detail::log_terms(frame, ysum.data(), mx);
    if (!std::isfinite(mx)) return {0.0, 0.0};

    const int M = frame.max_abs_coord();
    std::vector<std::vector<std::complex<double>>> tables;
    for (int a = 0; a < n; ++a) tables.push_back(detail::phase_table(M, p.x[a] - q.x[a]));

    CompensatedComplexSum acc;
    for (std::size_t i = 0; i < frame.size(); ++i) {
        const double rel = e[i] - mx;
        if (rel < kNegligibleLogRatio) continue;
        std::complex<double> ph = tables[0][frame.coord(i, 0) + M];
        for (int a = 1; a < n; ++a) ph *= tables[a][frame.coord(i, a) + M];
        acc.add(std::exp(rel) * ph);
    }
    return acc.value() * std::exp(mx);
}

/// chi_k(T_P)(p, p), real and >= 0.
inline double kernel_diag(const ModeFrame& frame, const PointX& p) {
    return diag_moments<1>(frame, p, [](std::size_t) { return std::array<double, 1>{1.0}; })[0];
}

/// sum_m lambda_m^power w_m |f_m(p)|^2.
inline double weighted_diag(const ModeFrame& frame, const PointX& p, int power) {
    if (power < 0) throw ValidationError("weighted_diag: power must be >= 0");
    return diag_moments<1>(frame, p, [&](std::size_t i) {
        return std::array<double, 1>{std::pow(frame.shell(i).lambda, power)};
    })[0];
}

/// Im sum_m w_m conj(f_m) (R f_m)(p) = -(1/eps^2) sum_m w_m <m, y> |f_m(p)|^2.
inline double reeb_derivative_diag(const ModeFrame& frame, const PointX& p) {
    if (frame.empty()) throw ValidationError("reeb_derivative_diag: empty mode frame");
    const double e2 = frame.model().eps() * frame.model().eps();
    return diag_moments<1>(frame, p, [&](std::size_t i) {
        return std::array<double, 1>{-frame.dot(i, p.y.data()) / e2};
    })[0];
}

inline void require_ladder(const std::vector<double>& ks, std::size_t min_points, const char* op) {
    if (ks.size() < min_points) {
        throw ValidationError(std::string(op) + ": needs at least " + std::to_string(min_points) + " k values");
    }
    for (std::size_t i = 1; i < ks.size(); ++i) {
        if (!(ks[i] > ks[i - 1])) throw ValidationError(std::string(op) + ": ks must be strictly ascending");
    }
}

/// (k, k^{-(d+1)} chi_k(T_P)(p, p)).
inline Series diag_series(const TorusGrauertTube& model, const BumpFunction& chi, const PointX& p,
                          const std::vector<double>& ks, VolumeForm volume = VolumeForm::riemannian) {
    require_ladder(ks, 3, "diag_series");
    Series out;
    for (double k : ks) {
        const auto frame = build_frame(model, chi, k, false, volume);
        out.push_back({k, kernel_diag(frame, p) / std::pow(k, model.cr_dimension() + 1)});
    }
    return out;
}

/// (k, sum_m lambda_m^power chi(lambda_m/k) |s_m(p)|^2), unscaled.
inline Series weighted_diag_series(const TorusGrauertTube& model, const BumpFunction& chi, const PointX& p,
                                   int power, const std::vector<double>& ks) {
    if (power < 1) throw ValidationError("weighted_diag_series: power must be >= 1");
    require_ladder(ks, 1, "weighted_diag_series");
    Series out;
    for (double k : ks) out.push_back({k, weighted_diag(build_frame(model, chi, k, false), p, power)});
    return out;
}

/// Distance in the product metric of T^n x S^{n-1}_eps: periodic torus part
/// plus the chordal sphere part.
inline double product_distance(const PointX& p, const PointX& q) {
    double s = 0.0;
    for (std::size_t j = 0; j < p.x.size(); ++j) {
        double dx = std::fmod(std::abs(p.x[j] - q.x[j]), 2.0 * std::numbers::pi);
        dx = std::min(dx, 2.0 * std::numbers::pi - dx);
        const double dy = p.y[j] - q.y[j];
        s += dx * dx + dy * dy;
    }
    return std::sqrt(s);
}

/// |K(p, q)| / sqrt(K(p, p) K(q, q)), in [0, 1]; 0 when either diagonal vanishes.
inline double normalized_correlation(const ModeFrame& frame, const PointX& p, const PointX& q) {
    const double dp = kernel_diag(frame, p);
    const double dq = kernel_diag(frame, q);
    if (!(dp > 0.0) || !(dq > 0.0)) return 0.0;
    const double c = std::abs(kernel_eval(frame, p, q)) / std::sqrt(dp * dq);
    return std::min(c, 1.0);
}

inline constexpr double kDefaultSeparationFloor = 1e-3;

/// (k, normalized correlation of p and q).
inline Series offdiag_decay(const TorusGrauertTube& model, const BumpFunction& chi, const PointX& p,
                            const PointX& q, const std::vector<double>& ks,
                            double separation_floor = kDefaultSeparationFloor) {
    require_ladder(ks, 1, "offdiag_decay");
    const double dist = product_distance(p, q);
    if (dist < separation_floor) {
        throw ValidationError("offdiag_decay: points are " + std::to_string(dist) +
                              " apart, below the separation floor " + std::to_string(separation_floor));
    }
    Series out;
    for (double k : ks) out.push_back({k, normalized_correlation(build_frame(model, chi, k, false), p, q)});
    return out;
}

struct TraceConsistency {
    double quadrature = 0.0;
    double trace = 0.0;
    double residual = 0.0;
    double budget = 0.0;  // tolerance the residual is judged against
    int sphere_points = 0;
};

/// Sphere nodes that resolve exp(-2 <m, y>) for every mode of the frame: the
/// trapezoid error on the circle behaves like I_P(t) / I_0(t), t = 2 eps |m|.
inline int resolving_sphere_points(const ModeFrame& frame) {
    double top = 0.0;
    for (const auto& s : frame.shells()) top = std::max(top, static_cast<double>(s.norm_sq));
    const double t = 2.0 * frame.model().eps() * std::sqrt(top);
    return static_cast<int>(std::ceil(2.0 * t + 40.0));
}

/// | int_X chi_k(T_P)(x, x) dV - Tr chi_k(T_P) |, the integral by a torus
/// trapezoid rule times a sphere rule. `grid.sphere_points` is raised to
/// resolving_sphere_points() when smaller.
inline TraceConsistency trace_consistency(const TorusGrauertTube& model, const BumpFunction& chi, double k,
                                          QuadGrid grid = {}) {
    if (grid.torus_points < QuadGrid::kMinTorusPoints || grid.sphere_points < QuadGrid::kMinSpherePoints) {
        throw ValidationError("quadrature grid below the minimum (torus >= 4, sphere >= 8 points)");
    }
    const int n = model.n();
    const auto frame = build_frame(model, chi, k, false);
    TraceConsistency out;
    out.trace = spectral::trace_chi(model, chi, k);
    if (frame.empty()) {
        (void)sphere_rule(n, grid.sphere_points);  // still reject unsupported n
        out.residual = std::abs(out.trace);
        out.budget = 1e-8 * std::abs(out.trace);
        return out;
    }
    out.sphere_points = std::max(grid.sphere_points, resolving_sphere_points(frame));
    const SphereRule rule = sphere_rule(n, out.sphere_points);

    const double h = 2.0 * std::numbers::pi / grid.torus_points;
    std::size_t torus_nodes = 1;
    for (int a = 0; a < n; ++a) torus_nodes *= static_cast<std::size_t>(grid.torus_points);
    const double area = std::pow(model.eps(), n - 1);

    CompensatedSum acc;
    std::vector<double> x(n), y(n);
    for (std::size_t t = 0; t < torus_nodes; ++t) {
        std::size_t r = t;
        for (int a = 0; a < n; ++a) {
            x[a] = static_cast<double>(r % grid.torus_points) * h;
            r /= grid.torus_points;
        }
        for (std::size_t s = 0; s < rule.size(); ++s) {
            for (int a = 0; a < n; ++a) y[a] = model.eps() * rule.node(s)[a];
            PointX p{x, y};
            acc.add(std::pow(h, n) * rule.weights[s] * area * kernel_diag(frame, p));
        }
    }
    out.quadrature = acc.value();
    out.residual = std::abs(out.quadrature - out.trace);
    out.budget = 1e-8 * std::abs(out.trace);
    return out;
}

}  // namespace crspec::kernels
