#include <cmath>
#include <complex>
#include <numbers>

#include <gtest/gtest.h>

#include "crspec/asymfit/asymfit.hpp"
#include "crspec/kernels/kernels.hpp"
#include "crspec/models/torus.hpp"
#include "crspec/spectral/spectral.hpp"

using namespace crspec;
using namespace crspec::kernels;

namespace {

// s_m(p) straight from the definition, no log scaling.
std::complex<double> s_direct(const TorusGrauertTube& t, const std::vector<int>& m, const PointX& p) {
    const int n = t.n();
    double mx = 0.0, my = 0.0, m2 = 0.0;
    for (int j = 0; j < n; ++j) mx += m[j] * p.x[j], my += m[j] * p.y[j], m2 += m[j] * m[j];
    const double normalizer = std::pow(2 * std::numbers::pi, n) * std::pow(t.eps(), n - 1) *
                              specfun::gamma(n, 2 * t.eps() * std::sqrt(m2)) * specfun::sphere_volume(n - 2);
    return std::polar(std::exp(-my) / std::sqrt(normalizer), mx);
}

// sum over the box |m_i| <= r of chi(lambda/k) s_m(p) conj(s_m(q)), n = 2
std::complex<double> kernel_direct(const TorusGrauertTube& t, const BumpFunction& chi, double k, const PointX& p,
                                   const PointX& q, int r) {
    std::complex<double> s = 0.0;
    for (int a = -r; a <= r; ++a)
        for (int b = -r; b <= r; ++b) {
            const double w = chi(t.eigenvalue(std::hypot(a, b)) / k);
            if (w == 0.0) continue;
            s += w * s_direct(t, {a, b}, p) * std::conj(s_direct(t, {a, b}, q));
        }
    return s;
}

}  // namespace

TEST(Frame, EmptyBelowSpectrum) {
    const TorusGrauertTube t(2, 0.5);
    // k delta2 = 0.02 is below the smallest eigenvalue
    const auto g = build_frame(t, BumpFunction(0.01, 0.02), 1.0, false);
    EXPECT_TRUE(g.empty());
    EXPECT_EQ(kernel_diag(g, t.point({0, 0}, {1, 0})), 0.0);
    EXPECT_EQ(kernel_eval(g, t.point({0, 0}, {1, 0}), t.point({1, 0}, {0, 1})), std::complex<double>(0.0));
}

TEST(Frame, ModeCountMatchesSpectral) {
    const BumpFunction chi(1.0, 2.0);
    for (int n : {2, 3}) {
        const TorusGrauertTube t(n, 0.5);
        for (double k : {10.0, 30.0, 50.0}) {
            const auto f = build_frame(t, chi, k, false);
            EXPECT_EQ(static_cast<std::int64_t>(f.size()), spectral::mu_pairing(t, chi, k).n_eigen) << n << ' ' << k;
        }
    }
}

TEST(Frame, WeightsAndWindow) {
    const TorusGrauertTube t(2, 0.5);
    const BumpFunction chi(1.0, 2.0);
    const double peak = chi(1.5);
    const auto f = build_frame(t, chi, 40.0, false);
    for (const auto& s : f.shells()) {
        EXPECT_GT(s.lambda / 40.0, 1.0);
        EXPECT_LT(s.lambda / 40.0, 2.0);
        EXPECT_GE(s.weight, 0.0);
        EXPECT_LE(s.weight, peak);
    }
    const auto sq = build_frame(t, chi, 40.0, true);
    ASSERT_EQ(sq.size(), f.size());
    for (std::size_t i = 0; i < f.shells().size(); ++i)
        EXPECT_EQ(sq.shells()[i].weight, f.shells()[i].weight * f.shells()[i].weight);
}

TEST(Frame, WindowExactnessUnderSmallPerturbation) {
    const TorusGrauertTube t(2, 0.5);
    const BumpFunction chi(1.0, 2.0);
    const auto a = build_frame(t, chi, 25.0, false);
    const auto b = build_frame(t, chi, 25.0 * (1 + 1e-12), false);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) ASSERT_EQ(a.vector_of(i), b.vector_of(i));
}

TEST(Frame, ResourceGuard) {
    const TorusGrauertTube t(3, 0.5);
    ResourceBudget tiny;
    tiny.max_modes = 100;
    try {
        build_frame(t, BumpFunction(1.0, 2.0), 50.0, false, VolumeForm::riemannian, tiny);
        FAIL();
    } catch (const ResourceError& e) {
        EXPECT_NE(std::string(e.what()).find("modes"), std::string::npos);
    }
}

TEST(Kernel, MatchesDirectSum) {
    const TorusGrauertTube t(2, 0.5);
    const BumpFunction chi(1.0, 2.0);
    const double k = 6.0;
    const auto f = build_frame(t, chi, k, false);
    const auto p = t.point({0.3, 1.7}, {0.6, 0.8});
    const auto q = t.point({2.0, -0.4}, {-0.2, 1.0});
    const auto ref = kernel_direct(t, chi, k, p, q, 20);
    const auto got = kernel_eval(f, p, q);
    const double dref = kernel_direct(t, chi, k, p, p, 20).real();
    const double qref = kernel_direct(t, chi, k, q, q, 20).real();
    EXPECT_NEAR(kernel_diag(f, p), dref, 1e-13 * dref);
    EXPECT_NEAR(kernel_diag(f, q), qref, 1e-13 * qref);
    // off the diagonal the sum cancels; compare on the scale of its terms
    EXPECT_LT(std::abs(got - ref), 1e-13 * std::sqrt(dref * qref));
}

TEST(Kernel, HermitianAndTranslationInvariant) {
    const TorusGrauertTube t(2, 0.5);
    const auto f = build_frame(t, BumpFunction(1.0, 2.0), 30.0, false);
    const auto p = t.point({0.3, 1.7}, {0.6, 0.8});
    const auto q = t.point({2.0, 0.4}, {-0.2, 1.0});
    const auto pq = kernel_eval(f, p, q), qp = kernel_eval(f, q, p);
    const double scale = std::sqrt(kernel_diag(f, p) * kernel_diag(f, q));
    EXPECT_LT(std::abs(pq - std::conj(qp)), 1e-14 * scale);
    PointX p2 = p, q2 = q;
    for (int j = 0; j < 2; ++j) p2.x[j] += 0.7, q2.x[j] += 0.7;
    EXPECT_LT(std::abs(kernel_eval(f, p2, q2) - pq), 1e-12 * scale);
    const auto pp = kernel_eval(f, p, p);
    EXPECT_EQ(pp.imag(), 0.0);
    EXPECT_GT(pp.real(), 0.0);
}

TEST(Kernel, DiagonalIndependentOfTorusCoordinate) {
    const TorusGrauertTube t(2, 0.5);
    const auto f = build_frame(t, BumpFunction(1.0, 2.0), 40.0, false);
    const double a = kernel_diag(f, t.point({0.0, 0.0}, {0.6, 0.8}));
    const double b = kernel_diag(f, t.point({2.5, 4.1}, {0.6, 0.8}));
    EXPECT_EQ(a, b);
}

TEST(Kernel, DiagonalPowerLaw) {
    const BumpFunction chi(1.0, 2.0);
    for (int n : {2, 3}) {
        const TorusGrauertTube t(n, 0.5);
        std::vector<double> dir(n, 0.0);
        dir[0] = 1.0;
        const auto p = t.point(std::vector<double>(n, 0.0), dir);
        const std::vector<double> ks = n == 2 ? std::vector<double>{20, 40, 80, 200} : std::vector<double>{8, 16, 32, 80};
        auto s = diag_series(t, chi, p, ks);
        for (auto& pt : s) pt.value *= std::pow(pt.k, n);  // raw diagonal
        const auto fit = asymfit::fit_power(s);
        EXPECT_NEAR(fit.exponent, n, 0.1) << n;
    }
}

TEST(Kernel, AntipodalDiagonalsAgree) {
    const TorusGrauertTube t(2, 0.5);
    const auto f = build_frame(t, BumpFunction(1.0, 2.0), 200.0, false);
    const double a = kernel_diag(f, t.point({0, 0}, {1, 0}));
    const double b = kernel_diag(f, t.point({0, 0}, {-1, 0}));
    EXPECT_LE(std::abs(a - b) / b, 0.02);
}

TEST(Kernel, WeightedDiag) {
    const TorusGrauertTube t(2, 0.5);
    const BumpFunction chi(1.0, 2.0);
    const auto p = t.point({0, 0}, {0.6, 0.8});
    const auto f = build_frame(t, chi, 100.0, false);
    EXPECT_EQ(weighted_diag(f, p, 0), kernel_diag(f, p));
    const double ratio = weighted_diag(f, p, 1) / (100.0 * kernel_diag(f, p));
    EXPECT_NEAR(ratio, chi.moment(2) / chi.moment(1), 0.02 * ratio);
    const auto s = weighted_diag_series(t, chi, p, 1, {20, 40, 80, 160});
    const auto fit = asymfit::fit_power(s);
    EXPECT_GE(fit.exponent, 2.9);
    EXPECT_LE(fit.exponent, 3.1);
    EXPECT_THROW(weighted_diag_series(t, chi, p, 0, {20, 40}), ValidationError);
}

TEST(Kernel, ReebDerivativeMatchesDifferenceQuotient) {
    const TorusGrauertTube t(2, 0.5);
    const auto g = t.geometry_constants();
    const auto f = build_frame(t, BumpFunction(1.0, 2.0), 12.0, false);
    const auto p = t.point({0.4, 1.0}, {0.6, -0.8});
    const auto R = g.reeb_at(p);
    const double h = 1e-5;
    PointX fwd = p, bwd = p;
    for (int j = 0; j < 2; ++j) fwd.x[j] += h * R[j], bwd.x[j] -= h * R[j];
    // d/dt K(p + t R, p) = sum w (R s_m)(p) conj(s_m(p))
    const auto fd = (kernel_eval(f, fwd, p) - kernel_eval(f, bwd, p)) / (2 * h);
    const double exact = reeb_derivative_diag(f, p);
    EXPECT_NEAR(fd.imag(), exact, 1e-7 * std::abs(exact));
    EXPECT_NEAR(fd.real(), 0.0, 1e-7 * std::abs(exact));
    // sphere-tangent direction: purely real derivative
    const std::vector<double> w{0.8, 0.6};
    PointX sf = p, sb = p;
    for (int j = 0; j < 2; ++j) sf.y[j] += h * w[j], sb.y[j] -= h * w[j];
    const auto a = kernel_eval(f, t.point(sf.x, sf.y), p), b = kernel_eval(f, t.point(sb.x, sb.y), p);
    EXPECT_EQ(a.imag(), 0.0);
    EXPECT_EQ(b.imag(), 0.0);
}

TEST(Kernel, ReebDerivativeExponent) {
    const TorusGrauertTube t(2, 0.5);
    const auto p = t.point({0, 0}, {-1.0, 0.0});
    Series s;
    for (double k : {20.0, 40.0, 80.0, 160.0})
        s.push_back({k, std::abs(reeb_derivative_diag(build_frame(t, BumpFunction(1.0, 2.0), k, false), p))});
    const auto fit = asymfit::fit_power(s);
    EXPECT_GE(fit.exponent, 2.9);
    EXPECT_LE(fit.exponent, 3.1);
    EXPECT_THROW(reeb_derivative_diag(build_frame(t, BumpFunction(0.01, 0.02), 1.0, false), p), ValidationError);
}

TEST(OffDiag, CorrelationBounds) {
    const TorusGrauertTube t(2, 0.5);
    const BumpFunction chi(1.0, 2.0);
    const auto f = build_frame(t, chi, 50.0, false);
    const auto p = t.point({0, 0}, {1, 0});
    EXPECT_NEAR(normalized_correlation(f, p, p), 1.0, 1e-14);
    for (double s : {0.01, 0.1, 1.0, 3.0}) {
        const auto q = t.point({s, 0.5 * s}, {1, 0.2 * s});
        const double c = normalized_correlation(f, p, q);
        EXPECT_GE(c, 0.0);
        EXPECT_LE(c, 1.0);
    }
    const auto close = t.point({1e-5, 0}, {1, 0});
    try {
        offdiag_decay(t, chi, p, close, {50.0});
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("separation floor"), std::string::npos);
    }
}

TEST(OffDiag, FastDecay) {
    const TorusGrauertTube t(2, 0.5);
    const auto p = t.point({0, 0}, {1, 0});
    const auto q = t.point({std::numbers::pi, std::numbers::pi}, {1, 0});
    const auto s = offdiag_decay(t, BumpFunction(1.0, 2.0), p, q, {20, 40, 80});
    for (const auto& pt : s) EXPECT_LT(pt.value, 1e-3);
    EXPECT_GT(s.front().value, s.back().value);
}

TEST(TraceConsistency, TorusN2) {
    const TorusGrauertTube t(2, 0.5);
    const BumpFunction chi(1.0, 2.0);
    const auto r = trace_consistency(t, chi, 30.0);
    EXPECT_LE(r.residual, 1e-8 * r.trace);
    EXPECT_GT(r.trace, 0.0);
    const auto r2 = trace_consistency(t, chi, 30.0, {16, 64});
    EXPECT_LE(r2.residual, 1e-8 * r2.trace);
    EXPECT_NEAR(r.quadrature, r2.quadrature, 1e-10 * r.trace);
    const auto empty = trace_consistency(t, BumpFunction(0.01, 0.02), 1.0);
    EXPECT_EQ(empty.trace, 0.0);
    EXPECT_EQ(empty.residual, 0.0);
    EXPECT_THROW(trace_consistency(TorusGrauertTube(4, 0.5), chi, 2.0), ValidationError);
}
