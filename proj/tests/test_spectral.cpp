#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "crspec/asymfit/asymfit.hpp"
#include "crspec/models/circle_bundle.hpp"
#include "crspec/models/tabulated.hpp"
#include "crspec/models/torus.hpp"
#include "crspec/spectral/spectral.hpp"

using namespace crspec;
using namespace crspec::spectral;

namespace {

double simpson_moment(const BumpFunction& chi, int p, int panels = 1 << 12) {
    const double a = chi.delta1(), b = chi.delta2(), h = (b - a) / panels;
    double s = 0.0;
    for (int i = 0; i <= panels; ++i) {
        const double t = a + i * h;
        const double w = (i == 0 || i == panels) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        s += w * std::pow(t, p) * chi(t);
    }
    return s * h / 3.0;
}

}  // namespace

TEST(Counting, Examples) {
    const auto cp1 = projective_space(1);
    EXPECT_EQ(counting(cp1, 2.5), 5);
    const TorusGrauertTube t(2, 0.5);
    EXPECT_EQ(counting(t, t.eigenvalue(1.0)), 4);
    EXPECT_EQ(counting(t, 0.1), 0);
    EXPECT_EQ(counting(cp1, 0.5), 0);
    EXPECT_THROW(counting(t, -1.0), ValidationError);
}

TEST(Counting, Monotone) {
    const TorusGrauertTube t(3, 0.5);
    std::int64_t prev = 0;
    for (int i = 1; i <= 60; ++i) {
        const auto c = counting(t, 0.5 * i);
        EXPECT_GE(c, prev);
        prev = c;
    }
}

TEST(MuPairing, Linearity) {
    const TorusGrauertTube t(2, 0.5);
    const BumpFunction chi(1.0, 2.0);
    const auto a = mu_pairing(t, chi, 40.0);
    const auto b = mu_pairing(t, chi.scaled(3.0), 40.0);
    EXPECT_NEAR(b.pairing, 3.0 * a.pairing, 1e-15 * b.pairing);
    EXPECT_EQ(a.n_eigen, b.n_eigen);
    EXPECT_GT(a.pairing, 0.0);
}

TEST(MuPairing, WindowCount) {
    const TorusGrauertTube t(2, 0.5);
    const BumpFunction chi(1.0, 2.0);
    const double k = 30.0;
    const auto r = mu_pairing(t, chi, k);
    std::int64_t strictly_below_hi = 0, at_most_lo = counting(t, k);
    for (const auto& l : t.spectrum_up_to(2 * k))
        if (l.lambda < 2 * k) strictly_below_hi += l.multiplicity;
    EXPECT_EQ(r.n_eigen, strictly_below_hi - at_most_lo);
}

TEST(MuPairing, EmptyWindow) {
    const TabulatedSpectrum s(1, {{1.0, 1}, {100.0, 1}});
    const auto r = mu_pairing(s, BumpFunction(1.0, 2.0), 5.0);
    EXPECT_EQ(r.pairing, 0.0);
    EXPECT_EQ(r.n_eigen, 0);
    EXPECT_TRUE(std::isnan(r.limit));
    EXPECT_THROW(limit_pairing(s, BumpFunction(1.0, 2.0)), ValidationError);
    EXPECT_THROW(mu_pairing(s, BumpFunction(1.0, 2.0), 0.5), ValidationError);
}

TEST(LimitPairing, TorusAndCircleBundle) {
    const BumpFunction chi(1.0, 2.0);
    EXPECT_NEAR(limit_pairing(TorusGrauertTube(2, 0.5), chi), 2 * std::numbers::pi * simpson_moment(chi, 1),
                1e-9);
    EXPECT_NEAR(limit_pairing(TorusGrauertTube(3, 0.5), chi), 4 * std::numbers::pi * simpson_moment(chi, 2),
                1e-9);
    EXPECT_NEAR(limit_pairing(projective_space(1), chi), simpson_moment(chi, 1), 1e-10);
}

TEST(LimitPairing, EulerMaclaurinOnCP1) {
    // sum_m (m+1) chi(m/k) = k^2 int t chi + k int chi + O(k^-inf)
    const BumpFunction chi(1.0, 2.0);
    const auto cp1 = projective_space(1);
    const double m1 = simpson_moment(chi, 1), m0 = simpson_moment(chi, 0);
    for (double k : {50.0, 200.0, 1000.0}) {
        const auto r = mu_pairing(cp1, chi, k);
        EXPECT_NEAR(r.pairing, m1 + m0 / k, 1e-10) << k;
    }
}

TEST(Trace, Examples) {
    const auto cp1 = projective_space(1);
    EXPECT_EQ(trace_chi(cp1, BumpFunction(1.0, 2.0), 1.0), 0.0);
    const TorusGrauertTube t(2, 0.5);
    const BumpFunction chi(1.0, 2.0);
    const double tr = trace_chi(t, chi, 100.0);
    EXPECT_NEAR(tr, 1e4 * mu_pairing(t, chi, 100.0).pairing, 1e-12 * tr);
}

TEST(Trace, MergingEqualEigenvalues) {
    const BumpFunction chi(1.0, 2.0);
    const TabulatedSpectrum split(1, {{12.0, 2}, {15.0, 1}, {12.0, 3}, {17.5, 4}});
    const TabulatedSpectrum merged(1, {{17.5, 4}, {12.0, 5}, {15.0, 1}});
    EXPECT_NEAR(trace_chi(split, chi, 10.0), trace_chi(merged, chi, 10.0), 1e-15);
}

TEST(Trace, SupportWindowExclusive) {
    const BumpFunction chi(1.0, 2.0);
    const TabulatedSpectrum edge(1, {{10.0, 7}, {20.0, 9}});
    EXPECT_EQ(trace_chi(edge, chi, 10.0), 0.0);
    EXPECT_EQ(mu_pairing(edge, chi, 10.0).n_eigen, 0);
}

TEST(MuPairing, TorusConvergence) {
    const TorusGrauertTube t(2, 0.5);
    const BumpFunction chi(1.0, 2.0);
    const double limit = 2 * std::numbers::pi * simpson_moment(chi, 1);
    double prev = INFINITY;
    for (double k : {50.0, 100.0, 200.0, 400.0}) {
        const auto r = mu_pairing(t, chi, k);
        EXPECT_NEAR(r.limit, limit, 1e-9);
        const double err = std::abs(r.pairing - limit);
        EXPECT_LE(err, 1.1 * prev) << k;
        prev = err;
        EXPECT_LE(err, (k >= 400.0 ? 0.03 : 0.05) * limit) << k;
    }
}

TEST(Weyl, Examples) {
    const auto s = weyl_scan(projective_space(1), {10.0, 20.0, 40.0});
    ASSERT_EQ(s.size(), 3u);
    EXPECT_EQ(s[0].value, 65.0);
    EXPECT_EQ(s[1].value, 230.0);
    EXPECT_EQ(s[2].value, 860.0);
    EXPECT_TRUE(weyl_scan(projective_space(1), {}).empty());
    EXPECT_THROW(weyl_scan(projective_space(1), {2.0, 1.0}), ValidationError);
}

TEST(Weyl, TorusExponent) {
    const TorusGrauertTube t(2, 0.5);
    const auto s = weyl_scan(t, {50.0, 100.0, 200.0, 400.0});
    // lattice-count oracle: N(k) ~ #{m : lambda(|m|) <= k} ~ pi k^2
    std::int64_t direct = 0;
    const double rho = t.norm_for_eigenvalue(50.0);
    const int r = static_cast<int>(rho) + 2;
    for (int a = -r; a <= r; ++a)
        for (int b = -r; b <= r; ++b)
            if ((a || b) && t.eigenvalue(std::hypot(a, b)) <= 50.0) ++direct;
    EXPECT_EQ(s[0].value, static_cast<double>(direct));
    const auto fit = asymfit::fit_power(s);
    EXPECT_GE(fit.exponent, 1.9);
    EXPECT_LE(fit.exponent, 2.1);
}
