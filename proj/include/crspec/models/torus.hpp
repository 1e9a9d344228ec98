#pragma once

// Grauert tube over the flat torus M = C^n / 2 pi Z^n. The CR manifold is
// X = { [x + i y] : |y| = eps } = T^n x S^{n-1}_eps, of CR dimension d = n - 1.
//
// Conventions: contact form xi = -sum y_j dx_j, Reeb field R = -(1/eps^2) sum y_j d/dx_j,
// so that xi(R) = 1 and Pi(-i R)Pi has positive spectrum lambda_m / eps. The
// "grauert" variant is A = Pi (i/eps) T Pi with T = sum y_j d/dx_j and spectrum
// lambda_m = |m| gamma_n'(2 eps |m|) / gamma_n(2 eps |m|).

#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "crspec/core/error.hpp"
#include "crspec/core/summation.hpp"
#include "crspec/models/lattice.hpp"
#include "crspec/models/model_spectrum.hpp"
#include "crspec/models/sphere_rule.hpp"
#include "crspec/specfun/gamma.hpp"

namespace crspec {

enum class OperatorVariant { grauert, reeb };

inline const char* to_string(OperatorVariant v) { return v == OperatorVariant::grauert ? "grauert" : "reeb"; }

inline OperatorVariant operator_variant_from(const std::string& s) {
    if (s == "grauert") return OperatorVariant::grauert;
    if (s == "reeb") return OperatorVariant::reeb;
    throw ValidationError("operator_variant must be 'grauert' or 'reeb', got '" + s + "'");
}

// A point [x + i y] of X; x in [0, 2 pi)^n, |y| = eps.
struct PointX {
    std::vector<double> x;
    std::vector<double> y;
};

struct EigenfunctionLog {
    double log_modulus = 0.0;
    double phase = 0.0;  // in [0, 2 pi)
};

struct QuadGrid {
    int torus_points = 8;   // per torus axis, >= kMinTorusPoints
    int sphere_points = 64; // >= kMinSpherePoints

    static constexpr int kMinTorusPoints = 4;
    static constexpr int kMinSpherePoints = 8;
};

// Per-shell data needed by mode sums.
struct ShellData {
    double lambda = 0.0;         // operator-variant eigenvalue
    double log_norm_sq = 0.0;    // log((2pi)^n eps^{n-1} gamma_n(2 eps |m|) vol(S^{n-2}))
};

// Geometric constants of the tube. sigma_P(xi) and dV_xi/dV are constant on X.
struct GeometryConstants {
    int n = 0;
    double eps = 0.0;
    double sigma_p_xi = 0.0;
    double dvxi_over_dv = 0.0;

    // Torus components of xi at p (sphere components vanish).
    std::vector<double> xi_at(const PointX& p) const {
        std::vector<double> c(p.y.size());
        for (std::size_t j = 0; j < c.size(); ++j) c[j] = -p.y[j];
        return c;
    }
    // Torus components of the Reeb field at p.
    std::vector<double> reeb_at(const PointX& p) const {
        std::vector<double> c(p.y.size());
        for (std::size_t j = 0; j < c.size(); ++j) c[j] = -p.y[j] / (eps * eps);
        return c;
    }
};

class TorusGrauertTube final : public ModelSpectrum {
public:
    TorusGrauertTube(int n, double eps, OperatorVariant variant = OperatorVariant::grauert)
        : n_(n), eps_(eps), variant_(variant) {
        if (n < 2) throw ValidationError("model.n must be >= 2");
        if (!(eps > 0.0) || !std::isfinite(eps)) throw ValidationError("model.eps must be > 0");
    }

    int n() const noexcept { return n_; }
    double eps() const noexcept { return eps_; }
    OperatorVariant variant() const noexcept { return variant_; }
    int cr_dimension() const override { return n_ - 1; }

    std::string name() const override {
        return "torus(n=" + std::to_string(n_) + ", eps=" + format_eps() + ", " + to_string(variant_) + ")";
    }

    /// Eigenvalue attached to lattice vectors of norm |m| = norm.
    double eigenvalue(double norm) const {
        if (norm < 0.0) throw DomainError("eigenvalue: norm must be >= 0");
        if (norm == 0.0) return 0.0;
        const double lam = norm * specfun::gamma_ratio(n_, 2.0 * eps_ * norm);
        return variant_ == OperatorVariant::reeb ? lam / eps_ : lam;
    }

    ShellData shell_data(double norm) const {
        const double t = 2.0 * eps_ * norm;
        const auto mom = specfun::gamma_moments(n_, t);
        ShellData s;
        const double lam = norm == 0.0 ? 0.0 : norm * (1.0 - mom.one_minus_cos / mom.scaled);
        s.lambda = variant_ == OperatorVariant::reeb ? lam / eps_ : lam;
        s.log_norm_sq = n_ * std::log(2.0 * std::numbers::pi) + (n_ - 1) * std::log(eps_) + t +
                        std::log(mom.scaled) + std::log(specfun::sphere_volume(n_ - 2));
        return s;
    }

    /// Smallest norm rho with eigenvalue(rho) >= lambda, to 1e-12 (bisection on
    /// the strictly increasing map rho -> eigenvalue(rho)).
    double norm_for_eigenvalue(double lambda) const {
        if (lambda <= 0.0) return 0.0;
        double lo = 0.0;
        double hi = 1.0;
        while (eigenvalue(hi) < lambda) {
            lo = hi;
            hi *= 2.0;
        }
        while (hi - lo > 1e-12 * std::max(1.0, hi)) {
            const double mid = 0.5 * (lo + hi);
            if (eigenvalue(mid) < lambda) lo = mid; else hi = mid;
        }
        return hi;
    }

    /// Shells 1 <= N <= max_norm^2 with their eigenvalues.
    std::vector<LatticeShell> shells(double max_norm, const ResourceBudget& budget = {}) const {
        auto out = lattice_shells(n_, max_norm, budget);
        for (auto& s : out) s.lambda = eigenvalue(std::sqrt(static_cast<double>(s.norm_sq)));
        return out;
    }

    std::vector<SpectralLine> spectrum_up_to(double cutoff) const override {
        return spectrum_up_to(cutoff, ResourceBudget{});
    }

    std::vector<SpectralLine> spectrum_up_to(double cutoff, const ResourceBudget& budget) const {
        if (!(cutoff > 0.0)) throw ValidationError("spectrum cutoff must be > 0");
        const double rho = norm_for_eigenvalue(cutoff);
        // one shell of outward slack against bisection round-off
        const double max_sq = std::floor(rho * rho) + 1.0;
        std::vector<SpectralLine> lines;
        for (const auto& s : shells(std::sqrt(max_sq), budget)) {
            if (s.lambda <= cutoff) lines.push_back({s.lambda, s.count});
        }
        return lines;
    }

    /// Shells with lo < lambda < hi, lambda attached. Only shells within one
    /// shell of the inverted window are evaluated.
    std::vector<LatticeShell> window_shells(double lo, double hi, const ResourceBudget& budget = {}) const {
        std::vector<LatticeShell> out;
        if (!(hi > 0.0) || !(hi > lo)) return out;
        const double rho_hi = norm_for_eigenvalue(hi);
        const double rho_lo = lo > 0.0 ? norm_for_eigenvalue(lo) : 0.0;
        const double first = std::max(0.0, std::floor(rho_lo * rho_lo) - 1.0);
        for (auto& s : lattice_shells(n_, std::sqrt(std::floor(rho_hi * rho_hi) + 1.0), budget)) {
            if (static_cast<double>(s.norm_sq) < first) continue;
            s.lambda = eigenvalue(std::sqrt(static_cast<double>(s.norm_sq)));
            if (s.lambda > lo && s.lambda < hi) out.push_back(s);
        }
        return out;
    }

    std::vector<SpectralLine> spectrum_in(double lo, double hi) const override {
        std::vector<SpectralLine> lines;
        for (const auto& s : window_shells(lo, hi)) lines.push_back({s.lambda, s.count});
        return lines;
    }

    std::int64_t count_up_to(double cutoff) const override {
        if (!(cutoff > 0.0)) return 0;
        const double rho = norm_for_eigenvalue(cutoff);
        const double sure = std::floor(rho * rho) - 1.0;  // shells strictly inside, up to round-off
        std::int64_t total = 0;
        for (const auto& s : lattice_shells(n_, std::sqrt(std::floor(rho * rho) + 1.0))) {
            if (static_cast<double>(s.norm_sq) < sure ||
                eigenvalue(std::sqrt(static_cast<double>(s.norm_sq))) <= cutoff) {
                total += s.count;
            }
        }
        return total;
    }

    /// vol(S^{n-1}) for the grauert variant; eps^n vol(S^{n-1}) for reeb.
    std::optional<double> limit_constant() const override {
        const double base = specfun::sphere_volume(n_ - 1);
        return variant_ == OperatorVariant::reeb ? std::pow(eps_, n_) * base : base;
    }

    // Riemannian volume of X = T^n x S^{n-1}_eps.
    double volume() const {
        return std::pow(2.0 * std::numbers::pi, n_) * std::pow(eps_, n_ - 1) *
               specfun::sphere_volume(n_ - 1);
    }

    GeometryConstants geometry_constants() const {
        GeometryConstants g;
        g.n = n_;
        g.eps = eps_;
        g.sigma_p_xi = variant_ == OperatorVariant::reeb ? 1.0 : eps_;
        g.dvxi_over_dv = std::ldexp(eps_, -(n_ - 1));
        return g;
    }

    /// C_P = (1/(2 pi^{d+1})) int_X dV_xi / sigma_P(xi)^{d+1}, assembled from the
    /// geometry constants. Must agree with limit_constant().
    double limit_constant_from_geometry() const {
        const auto g = geometry_constants();
        const int d = cr_dimension();
        return g.dvxi_over_dv * volume() /
               (2.0 * std::pow(std::numbers::pi, d + 1) * std::pow(g.sigma_p_xi, d + 1));
    }

    void check_point(const PointX& p) const {
        if (static_cast<int>(p.x.size()) != n_ || static_cast<int>(p.y.size()) != n_) {
            throw ValidationError("point dimension does not match model.n = " + std::to_string(n_));
        }
        double r2 = 0.0;
        for (double v : p.y) r2 += v * v;
        if (std::abs(std::sqrt(r2) - eps_) > 1e-12) {
            throw ValidationError("point.y is not on the sphere |y| = eps");
        }
    }

    /// Point with torus coordinates x and y = eps * dir / |dir|.
    PointX point(std::vector<double> x, const std::vector<double>& dir) const {
        if (static_cast<int>(x.size()) != n_ || static_cast<int>(dir.size()) != n_) {
            throw ValidationError("point dimension does not match model.n = " + std::to_string(n_));
        }
        double r2 = 0.0;
        for (double v : dir) r2 += v * v;
        if (!(r2 > 0.0)) throw ValidationError("sphere direction must be nonzero");
        const double s = eps_ / std::sqrt(r2);
        PointX p{std::move(x), std::vector<double>(n_)};
        for (int j = 0; j < n_; ++j) p.y[j] = s * dir[j];
        return p;
    }

    /// log|s_m(p)| and arg s_m(p) for
    /// s_m([z]) = e^{i<m,z>} / ((2pi)^{n/2} sqrt(eps^{n-1} gamma_n(2 eps |m|) vol(S^{n-2}))).
    EigenfunctionLog eigenfunction_log(const std::vector<std::int64_t>& m, const PointX& p) const {
        check_point(p);
        if (static_cast<int>(m.size()) != n_) throw ValidationError("lattice vector has wrong dimension");
        double my = 0.0, mx = 0.0, m2 = 0.0;
        for (int j = 0; j < n_; ++j) {
            const double mj = static_cast<double>(m[j]);
            my += mj * p.y[j];
            mx += mj * p.x[j];
            m2 += mj * mj;
        }
        EigenfunctionLog out;
        out.log_modulus = -my - 0.5 * shell_data(std::sqrt(m2)).log_norm_sq;
        double ph = std::fmod(mx, 2.0 * std::numbers::pi);
        if (ph < 0.0) ph += 2.0 * std::numbers::pi;
        out.phase = ph;
        return out;
    }

    /// |(s_m, s_m2) - delta_{m,m2}| with the inner product integrated by a
    /// tensor trapezoid rule on T^n times a sphere rule on S^{n-1}_eps.
    double orthonormality_residual(const std::vector<std::int64_t>& m,
                                   const std::vector<std::int64_t>& m2,
                                   const QuadGrid& grid = {}) const {
        if (static_cast<int>(m.size()) != n_ || static_cast<int>(m2.size()) != n_) {
            throw ValidationError("lattice vector has wrong dimension");
        }
        if (grid.torus_points < QuadGrid::kMinTorusPoints || grid.sphere_points < QuadGrid::kMinSpherePoints) {
            throw ValidationError("quadrature grid below the minimum (torus >= 4, sphere >= 8 points)");
        }
        const SphereRule rule = sphere_rule(n_, grid.sphere_points);

        // Torus factor: tensor-product trapezoid, evaluated axis by axis.
        std::complex<double> torus(1.0, 0.0);
        const double h = 2.0 * std::numbers::pi / grid.torus_points;
        for (int j = 0; j < n_; ++j) {
            const double dm = static_cast<double>(m[j] - m2[j]);
            std::complex<double> axis(0.0, 0.0);
            for (int g = 0; g < grid.torus_points; ++g) axis += std::polar(h, dm * g * h);
            torus *= axis;
        }

        double norm_a = 0.0, norm_b = 0.0;
        for (int j = 0; j < n_; ++j) {
            norm_a += static_cast<double>(m[j] * m[j]);
            norm_b += static_cast<double>(m2[j] * m2[j]);
        }
        const double log_norms =
            0.5 * (shell_data(std::sqrt(norm_a)).log_norm_sq + shell_data(std::sqrt(norm_b)).log_norm_sq);
        const double log_area = (n_ - 1) * std::log(eps_);
        CompensatedSum sphere;
        for (std::size_t i = 0; i < rule.size(); ++i) {
            const double* u = rule.node(i);
            double msum_y = 0.0;
            for (int j = 0; j < n_; ++j) msum_y += static_cast<double>(m[j] + m2[j]) * eps_ * u[j];
            sphere.add(rule.weights[i] * std::exp(-msum_y - log_norms + log_area));
        }
        const std::complex<double> inner = torus * sphere.value();
        const bool same = m == m2;
        return std::abs(inner - std::complex<double>(same ? 1.0 : 0.0, 0.0));
    }

private:
    std::string format_eps() const {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", eps_);
        return buf;
    }

    int n_;
    double eps_;
    OperatorVariant variant_;
};

}  // namespace crspec
