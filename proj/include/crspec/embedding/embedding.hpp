#pragma once

// Kodaira-type maps F_k(x) = c_k (sqrt(eta(lambda_m / k)) f_m(x))_m on the torus
// model and the Hermitian quantities built from them. F_k is never
// materialized: norms, differentials and pullbacks are mode sums.
//
// Mode derivatives: a torus direction u multiplies f_m by i<m, u>, a
// sphere-tangent direction w by -<m, w>, the Reeb field by -(i/eps^2)<m, y>.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "crspec/core/error.hpp"
#include "crspec/kernels/kernels.hpp"
#include "crspec/kernels/mode_frame.hpp"
#include "crspec/models/torus.hpp"
#include "crspec/specfun/bump.hpp"

namespace crspec::embedding {

enum class Scaling { plain, rescaled, sphere_normalized };

inline const char* to_string(Scaling s) {
    switch (s) {
        case Scaling::plain: return "plain";
        case Scaling::rescaled: return "rescaled";
        default: return "sphere-normalized";
    }
}

inline Scaling scaling_from(const std::string& s) {
    if (s == "plain") return Scaling::plain;
    if (s == "rescaled") return Scaling::rescaled;
    if (s == "sphere-normalized") return Scaling::sphere_normalized;
    throw ValidationError("embedding.scaling must be plain, rescaled or sphere-normalized, got '" + s + "'");
}

struct EmbeddingConfig {
    Scaling scaling = Scaling::rescaled;
    OperatorVariant variant = OperatorVariant::reeb;
};

// A tangent vector at `base`: torus part u and sphere-tangent part w.
struct TangentVector {
    PointX base;
    std::vector<double> u;
    std::vector<double> w;
};

struct OneFormValue {
    PointX point;
    std::vector<double> a;  // dx_l components
    std::vector<double> b;  // sphere-tangent components in tangent_frame(y)
    double reeb_pairing = 0.0;
};

struct EquivarianceMetrics {
    double a = 0.0;  // |k^{-1} dF_k R|^2
    double b = 0.0;  // |k^{-1} T_lambda F_k|^2
    double c = 0.0;  // |k^{-1} (T_lambda F_k - dF_k R)|^2
};

/// n - 1 orthonormal vectors spanning the tangent space of the sphere at y.
inline std::vector<std::vector<double>> tangent_frame(const std::vector<double>& y) {
    const int n = static_cast<int>(y.size());
    double r = 0.0;
    for (double v : y) r += v * v;
    r = std::sqrt(r);
    std::vector<std::vector<double>> basis{std::vector<double>(n)};
    for (int j = 0; j < n; ++j) basis[0][j] = y[j] / r;
    std::vector<std::vector<double>> out;
    for (int e = 0; e < n && static_cast<int>(out.size()) < n - 1; ++e) {
        std::vector<double> v(n, 0.0);
        v[e] = 1.0;
        for (const auto& b : basis) {
            double d = 0.0;
            for (int j = 0; j < n; ++j) d += v[j] * b[j];
            for (int j = 0; j < n; ++j) v[j] -= d * b[j];
        }
        double len = 0.0;
        for (double c : v) len += c * c;
        len = std::sqrt(len);
        if (len < 1e-6) continue;
        for (double& c : v) c /= len;
        basis.push_back(v);
        out.push_back(v);
    }
    return out;
}

class Embedding {
public:
    Embedding(const TorusGrauertTube& model, const BumpFunction& chi, double k, EmbeddingConfig cfg,
              const ResourceBudget& budget = {})
        : cfg_(cfg),
          frame_(build_frame(model, chi, k, true,
                             cfg.variant == OperatorVariant::reeb ? VolumeForm::contact : VolumeForm::riemannian,
                             budget)) {
        if (cfg.variant != model.variant()) {
            throw ValidationError("embedding operator_variant does not match the model");
        }
        const int d = model.cr_dimension();
        switch (cfg.scaling) {
            case Scaling::plain: scale_ = 1.0; break;
            case Scaling::rescaled:
                scale_ = std::sqrt(2.0 * std::pow(std::numbers::pi, d + 1) / std::pow(k, d + 1));
                break;
            case Scaling::sphere_normalized:
                scale_ = std::sqrt(2.0 * std::pow(std::numbers::pi, d + 1) / std::pow(k, d + 1) /
                                   chi.moment(d, true));
                break;
        }
    }

    const ModeFrame& frame() const noexcept { return frame_; }
    const TorusGrauertTube& model() const noexcept { return frame_.model(); }
    const EmbeddingConfig& config() const noexcept { return cfg_; }
    double scale() const noexcept { return scale_; }
    double k() const noexcept { return frame_.k(); }
    bool empty() const noexcept { return frame_.empty(); }

    /// |F_k(p)|^2 = c_k^2 eta_k(T_P)(p, p).
    double norm_sq(const PointX& p) const { return scale_ * scale_ * kernels::kernel_diag(frame_, p); }

    /// <dF v1, dF v2> (Hermitian, conjugate-linear in v2).
    std::complex<double> pairing(const TangentVector& v1, const TangentVector& v2) const {
        check_tangent(v1);
        check_tangent(v2);
        const auto& p = v1.base;
        const auto s = kernels::diag_moments<2>(frame_, p, [&](std::size_t i) {
            const double a1 = frame_.dot(i, v1.u.data()), b1 = -frame_.dot(i, v1.w.data());
            const double a2 = frame_.dot(i, v2.u.data()), b2 = -frame_.dot(i, v2.w.data());
            // (i a1 + b1) conj(i a2 + b2)
            return std::array<double, 2>{a1 * a2 + b1 * b2, a1 * b2 - b1 * a2};
        });
        return scale_ * scale_ * std::complex<double>(s[0], s[1]);
    }

    /// |dF_k v|^2.
    double differential_norm_sq(const TangentVector& v) const { return pairing(v, v).real(); }

    TangentVector reeb_vector(const PointX& p) const {
        const auto g = model().geometry_constants();
        return {p, g.reeb_at(p), std::vector<double>(p.y.size(), 0.0)};
    }

    /// F_k^* (alpha / g) with alpha = (1/2i) sum (conj z dz - z conj dz) and
    /// g = sum lambda_m |z_m|^2. Evaluated with the complex eigenfunction values.
    OneFormValue pullback_omega(const PointX& p) const {
        model().check_point(p);
        if (frame_.empty()) throw ValidationError("pullback_omega: empty frame (k below the embedding threshold)");
        const int n = frame_.n();
        const auto tangents = tangent_frame(p.y);
        std::vector<double> ysum(n);
        for (int j = 0; j < n; ++j) ysum[j] = 2.0 * p.y[j];
        double mx = 0.0;
        std::vector<double> e(frame_.size());
        mx = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < frame_.size(); ++i) {
            e[i] = frame_.shell(i).log_term - frame_.dot(i, ysum.data());
            mx = std::max(mx, e[i]);
        }
        const int M = frame_.max_abs_coord();
        std::vector<std::vector<std::complex<double>>> tables;
        for (int a = 0; a < n; ++a) tables.push_back(kernels::detail::phase_table(M, p.x[a]));

        CompensatedSum g;
        std::vector<CompensatedSum> dx(n), dw(tangents.size());
        for (std::size_t i = 0; i < frame_.size(); ++i) {
            const double rel = e[i] - mx;
            if (rel < kNegligibleLogRatio) continue;
            std::complex<double> ph = tables[0][frame_.coord(i, 0) + M];
            for (int a = 1; a < n; ++a) ph *= tables[a][frame_.coord(i, a) + M];
            const std::complex<double> z = std::exp(0.5 * rel) * ph;
            // conj(z) z has an exactly zero imaginary part; every mode derivative
            // is a scalar multiple of z, so conj(z) dz = scalar * conj(z) z.
            const std::complex<double> zz = std::conj(z) * z;
            g.add(frame_.shell(i).lambda * zz.real());
            for (int l = 0; l < n; ++l) {
                dx[l].add((std::complex<double>(0.0, frame_.coord(i, l)) * zz).imag());
            }
            for (std::size_t t = 0; t < tangents.size(); ++t) {
                dw[t].add((-frame_.dot(i, tangents[t].data()) * zz).imag());
            }
        }
        const double denom = g.value();
        if (!(denom > 0.0)) throw DomainError("pullback_omega: vanishing denominator");
        OneFormValue out;
        out.point = p;
        for (int l = 0; l < n; ++l) out.a.push_back(dx[l].value() / denom);
        for (auto& s : dw) out.b.push_back(s.value() / denom);
        const auto reeb = model().geometry_constants().reeb_at(p);
        for (int l = 0; l < n; ++l) out.reeb_pairing += out.a[l] * reeb[l];
        return out;
    }

    EquivarianceMetrics equivariance(const PointX& p) const {
        const double e2 = model().eps() * model().eps();
        const auto s = kernels::diag_moments<3>(frame_, p, [&](std::size_t i) {
            const double r = frame_.dot(i, p.y.data()) / e2;  // R f_m = -i r f_m
            const double lam = frame_.shell(i).lambda;         // T_lambda z_m = i lam z_m
            return std::array<double, 3>{r * r, lam * lam, (lam + r) * (lam + r)};
        });
        const double f = scale_ * scale_ / (k() * k());
        return {f * s[0], f * s[1], f * s[2]};
    }

    void check_tangent(const TangentVector& v) const {
        model().check_point(v.base);
        const auto n = v.base.y.size();
        if (v.u.size() != n || v.w.size() != n) throw ValidationError("tangent vector has wrong dimension");
        double wy = 0.0, ww = 0.0, yy = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            wy += v.w[j] * v.base.y[j];
            ww += v.w[j] * v.w[j];
            yy += v.base.y[j] * v.base.y[j];
        }
        if (std::abs(wy) > 1e-12 * std::sqrt(ww * yy)) {
            throw ValidationError("tangent vector: sphere part is not tangent to the sphere");
        }
    }

private:
    EmbeddingConfig cfg_;
    ModeFrame frame_;
    double scale_ = 1.0;
};

/// Distance of the pulled-back form from sigma_P(xi)^{-1} xi, minimized over the
/// global sign of xi.
struct ContactComparison {
    double deviation = 0.0;  // max over torus components
    double sphere_max = 0.0; // max |b_j|, exactly 0 by structure
    int sign = 1;
};

inline ContactComparison compare_with_contact_form(const OneFormValue& w, const GeometryConstants& g) {
    const auto xi = g.xi_at(w.point);
    ContactComparison best;
    best.deviation = std::numeric_limits<double>::infinity();
    for (int sign : {1, -1}) {
        double dev = 0.0;
        for (std::size_t l = 0; l < xi.size(); ++l) {
            dev = std::max(dev, std::abs(w.a[l] - sign * xi[l] / g.sigma_p_xi));
        }
        if (dev < best.deviation) {
            best.deviation = dev;
            best.sign = sign;
        }
    }
    for (double b : w.b) best.sphere_max = std::max(best.sphere_max, std::abs(b));
    return best;
}

/// Low-discrepancy points on T^n x S^{n-1}_eps: a Kronecker sequence with the
/// generalized golden ratio, shifted by a seed-determined offset.
inline std::vector<PointX> sample_points(const TorusGrauertTube& model, std::size_t count, std::uint64_t seed) {
    const int n = model.n();
    const int dims = 2 * n - 1;
    // phi_dims: the positive root of x^{dims+1} = x + 1
    double phi = 2.0;
    for (int it = 0; it < 64; ++it) phi = std::pow(1.0 + phi, 1.0 / (dims + 1));
    std::vector<double> alpha(dims), shift(dims);
    std::mt19937_64 rng(seed);
    for (int j = 0; j < dims; ++j) {
        alpha[j] = std::fmod(std::pow(1.0 / phi, j + 1), 1.0);
        shift[j] = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    }
    std::vector<PointX> out;
    for (std::size_t s = 1; s <= count; ++s) {
        std::vector<double> u(dims);
        for (int j = 0; j < dims; ++j) u[j] = std::fmod(shift[j] + static_cast<double>(s) * alpha[j], 1.0);
        std::vector<double> x(n), dir(n);
        for (int j = 0; j < n; ++j) x[j] = 2.0 * std::numbers::pi * u[j];
        if (n == 2) {
            const double th = 2.0 * std::numbers::pi * u[2];
            dir = {std::cos(th), std::sin(th)};
        } else if (n == 3) {
            const double z = 2.0 * u[3] - 1.0;
            const double ph = 2.0 * std::numbers::pi * u[4];
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            dir = {r * std::cos(ph), r * std::sin(ph), z};
        } else {
            throw ValidationError("sample_points supports n = 2 and n = 3 only");
        }
        out.push_back(model.point(std::move(x), dir));
    }
    return out;
}

struct InjectivityResult {
    double max_correlation = 0.0;
    std::size_t first = 0;
    std::size_t second = 0;
    double min_separation = 0.0;
};

/// Largest normalized correlation |K(p,q)| / sqrt(K(p,p) K(q,q)) over sample pairs.
inline InjectivityResult injectivity_scan(const Embedding& emb, const std::vector<PointX>& samples,
                                          double separation_floor) {
    if (samples.size() < 2) throw ValidationError("injectivity_scan: needs at least two samples");
    InjectivityResult out;
    out.min_separation = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < samples.size(); ++i) {
        for (std::size_t j = i + 1; j < samples.size(); ++j) {
            const double d = kernels::product_distance(samples[i], samples[j]);
            if (d < separation_floor) {
                throw ValidationError("injectivity_scan: samples " + std::to_string(i) + " and " +
                                      std::to_string(j) + " are closer than the separation floor " +
                                      std::to_string(separation_floor));
            }
            out.min_separation = std::min(out.min_separation, d);
        }
    }
    const auto& frame = emb.frame();
    std::vector<double> diag(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) diag[i] = kernels::kernel_diag(frame, samples[i]);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        for (std::size_t j = i + 1; j < samples.size(); ++j) {
            if (!(diag[i] > 0.0) || !(diag[j] > 0.0)) continue;
            const double c = std::min(
                1.0, std::abs(kernels::kernel_eval(frame, samples[i], samples[j])) / std::sqrt(diag[i] * diag[j]));
            if (c > out.max_correlation) {
                out.max_correlation = c;
                out.first = i;
                out.second = j;
            }
        }
    }
    return out;
}

struct SphereDefect {
    double sup_defect = 0.0;
    std::vector<double> cm_norms;  // per sample: max(|u|, |du| along coordinate directions)
};

inline constexpr double kDefectStep = 1e-4;

/// u(x) = |F_k(x)| - 1 at the samples, with central differences along the
/// torus axes and along great circles through an orthonormal tangent frame.
inline SphereDefect sphere_defect(const Embedding& emb, const std::vector<PointX>& samples) {
    if (samples.empty()) throw ValidationError("sphere_defect: no samples");
    const auto& model = emb.model();
    const double eps = model.eps();
    const auto u_at = [&](const PointX& p) { return std::sqrt(emb.norm_sq(p)) - 1.0; };
    SphereDefect out;
    for (const auto& p : samples) {
        const double u0 = u_at(p);
        double cm = std::abs(u0);
        out.sup_defect = std::max(out.sup_defect, std::abs(u0));
        for (std::size_t a = 0; a < p.x.size(); ++a) {
            PointX plus = p, minus = p;
            plus.x[a] += kDefectStep;
            minus.x[a] -= kDefectStep;
            cm = std::max(cm, std::abs(u_at(plus) - u_at(minus)) / (2.0 * kDefectStep));
        }
        const double th = kDefectStep / eps;
        for (const auto& t : tangent_frame(p.y)) {
            std::vector<double> dp(p.y.size()), dm(p.y.size());
            for (std::size_t j = 0; j < p.y.size(); ++j) {
                dp[j] = std::cos(th) * p.y[j] + std::sin(th) * eps * t[j];
                dm[j] = std::cos(th) * p.y[j] - std::sin(th) * eps * t[j];
            }
            const PointX plus = model.point(p.x, dp), minus = model.point(p.x, dm);
            cm = std::max(cm, std::abs(u_at(plus) - u_at(minus)) / (2.0 * kDefectStep));
        }
        out.cm_norms.push_back(cm);
    }
    return out;
}

namespace detail {

// Smallest eigenvalue of a small symmetric matrix (cyclic Jacobi).
inline double min_eigenvalue(std::vector<std::vector<double>> a) {
    const std::size_t n = a.size();
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
        if (off < 1e-30) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (a[p][q] == 0.0) continue;
                const double theta = 0.5 * (a[q][q] - a[p][p]) / a[p][q];
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    double m = a[0][0];
    for (std::size_t i = 1; i < n; ++i) m = std::min(m, a[i][i]);
    return m;
}

}  // namespace detail

struct GramFloors {
    double reeb = 0.0;  // min over samples of |dF R|^2 / |F|^2
    double levi = 0.0;  // min over samples of the least eigenvalue of Re<dF v_i, dF v_j> / |F|^2 on ker xi
};

/// Immersion evidence: the Reeb direction and the 2d horizontal directions
/// (torus and sphere directions orthogonal to y) stay nondegenerate.
inline GramFloors gram_floors(const Embedding& emb, const std::vector<PointX>& samples) {
    if (samples.empty()) throw ValidationError("gram_floors: no samples");
    GramFloors out;
    out.reeb = out.levi = std::numeric_limits<double>::infinity();
    for (const auto& p : samples) {
        const double f2 = emb.norm_sq(p);
        if (!(f2 > 0.0)) throw DomainError("gram_floors: |F_k|^2 vanishes (k below the embedding threshold)");
        out.reeb = std::min(out.reeb, emb.differential_norm_sq(emb.reeb_vector(p)) / f2);
        const auto tangents = tangent_frame(p.y);
        const std::vector<double> zero(p.y.size(), 0.0);
        std::vector<TangentVector> dirs;
        for (const auto& t : tangents) dirs.push_back({p, t, zero});
        for (const auto& t : tangents) dirs.push_back({p, zero, t});
        std::vector<std::vector<double>> gram(dirs.size(), std::vector<double>(dirs.size()));
        for (std::size_t i = 0; i < dirs.size(); ++i)
            for (std::size_t j = i; j < dirs.size(); ++j)
                gram[i][j] = gram[j][i] = emb.pairing(dirs[i], dirs[j]).real() / f2;
        out.levi = std::min(out.levi, detail::min_eigenvalue(gram));
    }
    return out;
}

}  // namespace crspec::embedding
