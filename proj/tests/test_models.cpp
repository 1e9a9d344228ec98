#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "crspec/models/circle_bundle.hpp"
#include "crspec/models/lattice.hpp"
#include "crspec/models/tabulated.hpp"
#include "crspec/models/torus.hpp"
#include "crspec/specfun/bessel.hpp"

using namespace crspec;

namespace {

std::map<std::int64_t, std::int64_t> brute_counts(int n, int r) {
    std::map<std::int64_t, std::int64_t> out;
    std::vector<int> m(n, -r);
    while (true) {
        std::int64_t s = 0;
        for (int v : m) s += static_cast<std::int64_t>(v) * v;
        if (s > 0 && s <= static_cast<std::int64_t>(r) * r) ++out[s];
        int j = 0;
        while (j < n && m[j] == r) m[j++] = -r;
        if (j == n) break;
        ++m[j];
    }
    return out;
}

// Leibniz expansion over all permutations.
double leibniz_det(const std::vector<std::vector<double>>& a) {
    const int k = static_cast<int>(a.size());
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    double det = 0.0;
    do {
        int inversions = 0;
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j) inversions += perm[i] > perm[j];
        double term = inversions % 2 ? -1.0 : 1.0;
        for (int i = 0; i < k; ++i) term *= a[i][perm[i]];
        det += term;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return det;
}

// (2^{-d}/d!) xi ^ (dxi)^d on an orthonormal frame of T_p X, with xi = -sum y dx
// and dxi = sum dx_j ^ dy_j. Coordinates on R^{2n}: (x_1..x_n, y_1..y_n).
double contact_density(int n, const std::vector<double>& y) {
    const int d = n - 1;
    // frame: d/dx_j, then an orthonormal basis of y-perp inside the y-block
    std::vector<std::vector<double>> frame;
    for (int j = 0; j < n; ++j) {
        std::vector<double> v(2 * n, 0.0);
        v[j] = 1.0;
        frame.push_back(v);
    }
    std::vector<std::vector<double>> ybasis{y};
    for (int j = 0; j < n && static_cast<int>(ybasis.size()) < n; ++j) {
        std::vector<double> v(n, 0.0);
        v[j] = 1.0;
        for (const auto& b : ybasis) {
            double dot = 0.0, bb = 0.0;
            for (int i = 0; i < n; ++i) dot += v[i] * b[i], bb += b[i] * b[i];
            for (int i = 0; i < n; ++i) v[i] -= dot / bb * b[i];
        }
        double nv = 0.0;
        for (double c : v) nv += c * c;
        if (nv < 1e-8) continue;
        ybasis.push_back(v);
    }
    for (std::size_t b = 1; b < ybasis.size(); ++b) {
        double nv = 0.0;
        for (double c : ybasis[b]) nv += c * c;
        std::vector<double> v(2 * n, 0.0);
        for (int i = 0; i < n; ++i) v[n + i] = ybasis[b][i] / std::sqrt(nv);
        frame.push_back(v);
    }
    // xi ^ (dxi)^d / d! = sum_i sum_{J increasing, |J| = d} (-y_i) dx_i ^ dx_j1 ^ dy_j1 ^ ...
    double total = 0.0;
    std::vector<int> sel(n, 0);
    std::fill(sel.begin(), sel.begin() + d, 1);
    std::sort(sel.begin(), sel.end());
    do {
        std::vector<int> J;
        for (int j = 0; j < n; ++j)
            if (sel[j]) J.push_back(j);
        for (int i = 0; i < n; ++i) {
            std::vector<int> forms{i};
            for (int j : J) {
                forms.push_back(j);
                forms.push_back(n + j);
            }
            std::vector<std::vector<double>> a(forms.size(), std::vector<double>(forms.size()));
            for (std::size_t r = 0; r < forms.size(); ++r)
                for (std::size_t c = 0; c < frame.size(); ++c) a[r][c] = frame[c][forms[r]];
            total += -y[i] * leibniz_det(a);
        }
    } while (std::next_permutation(sel.begin(), sel.end()));
    return std::ldexp(std::abs(total), -d);
}

}  // namespace

TEST(Lattice, Examples) {
    const auto s1 = lattice_shells(2, 1.0);
    ASSERT_EQ(s1.size(), 1u);
    EXPECT_EQ(s1[0].norm_sq, 1);
    EXPECT_EQ(s1[0].count, 4);
    const auto s5 = lattice_shells(2, 5.0);
    const auto it = std::find_if(s5.begin(), s5.end(), [](const LatticeShell& s) { return s.norm_sq == 25; });
    ASSERT_NE(it, s5.end());
    EXPECT_EQ(it->count, 12);
    EXPECT_EQ(it->count, brute_counts(2, 5)[25]);
    const auto s3 = lattice_shells(3, 1.7);
    ASSERT_EQ(s3.size(), 2u);
    EXPECT_EQ(s3[0].count, 6);
    EXPECT_EQ(s3[1].norm_sq, 2);
    EXPECT_EQ(s3[1].count, 12);
}

TEST(Lattice, MatchesBruteForce) {
    const auto c2 = sum_of_squares_counts(2, 10000);
    const auto b2 = brute_counts(2, 100);
    for (std::int64_t N = 1; N <= 10000; ++N) {
        const auto f = b2.find(N);
        ASSERT_EQ(c2[N], f == b2.end() ? 0 : f->second) << N;
    }
    const auto c3 = sum_of_squares_counts(3, 1000);
    const auto b3 = brute_counts(3, 31);
    for (std::int64_t N = 1; N <= 961; ++N) {
        const auto f = b3.find(N);
        ASSERT_EQ(c3[N], f == b3.end() ? 0 : f->second) << N;
    }
}

TEST(Lattice, BallTotal) {
    std::int64_t total = 0;
    for (const auto& s : lattice_shells(2, 10.0)) total += s.count;
    std::int64_t direct = 0;
    for (int a = -10; a <= 10; ++a)
        for (int b = -10; b <= 10; ++b) direct += (a * a + b * b <= 100) && (a || b);
    EXPECT_EQ(total, direct);
}

TEST(Lattice, ResourceGuard) {
    ResourceBudget tiny;
    tiny.max_bytes = 1024;
    try {
        lattice_shells(2, 100.0, tiny);
        FAIL();
    } catch (const ResourceError& e) {
        EXPECT_NE(std::string(e.what()).find("1024"), std::string::npos);
    }
    EXPECT_THROW(lattice_shells(2, 1e9), ResourceError);
    EXPECT_THROW(lattice_shells(2, 0.0), ValidationError);
}

TEST(Torus, EigenvalueExamples) {
    const TorusGrauertTube t2(2, 0.5), t3(3, 0.5);
    EXPECT_EQ(t2.eigenvalue(0.0), 0.0);
    const double i_ratio = specfun::bessel_i(1, 1.0) / specfun::bessel_i(0, 1.0);
    EXPECT_NEAR(t2.eigenvalue(1.0), i_ratio, 1e-12);
    EXPECT_NEAR(t2.eigenvalue(1.0), 0.44639, 1e-5);
    EXPECT_NEAR(t3.eigenvalue(1.0), 1.0 / std::tanh(1.0) - 1.0, 1e-12);
    const TorusGrauertTube r2(2, 0.5, OperatorVariant::reeb);
    EXPECT_NEAR(r2.eigenvalue(3.0), t2.eigenvalue(3.0) / 0.5, 1e-14);
    EXPECT_THROW(t2.eigenvalue(-1.0), DomainError);
}

TEST(Torus, EigenvalueMonotoneAndAsymptotic) {
    for (int n : {2, 3}) {
        const TorusGrauertTube t(n, 0.5);
        double prev = 0.0;
        for (int i = 1; i <= 10000; ++i) {
            const double rho = 0.1 * i;
            const double lam = t.eigenvalue(rho);
            ASSERT_GT(lam, prev) << rho;
            prev = lam;
            if (rho >= 100.0) {
                ASSERT_LE(std::abs(lam / rho - 1.0), (n - 1) * 1.5 / (2.0 * 2.0 * 0.5 * rho));
            }
        }
    }
}

TEST(Torus, ShellDataConsistent) {
    const TorusGrauertTube t(3, 0.7);
    for (double rho : {0.0, 1.0, 5.0, 40.0}) {
        const auto sd = t.shell_data(rho);
        EXPECT_NEAR(sd.lambda, t.eigenvalue(rho), 1e-13 * (1 + rho));
        const double direct = 3 * std::log(2 * std::numbers::pi) + 2 * std::log(0.7) +
                              specfun::log_gamma(3, 2 * 0.7 * rho) + std::log(specfun::sphere_volume(1));
        EXPECT_NEAR(sd.log_norm_sq, direct, 1e-12 * (1 + std::abs(direct)));
    }
}

TEST(Torus, SpectrumExamples) {
    const TorusGrauertTube t(2, 0.5);
    const auto one = t.spectrum_up_to(t.eigenvalue(1.0));
    ASSERT_EQ(one.size(), 1u);
    EXPECT_NEAR(one[0].lambda, 0.44639, 1e-5);
    EXPECT_EQ(one[0].multiplicity, 4);
    EXPECT_THROW(t.spectrum_up_to(0.0), ValidationError);
    EXPECT_TRUE(t.spectrum_up_to(1e-9).empty());
}

TEST(Torus, SpectrumMatchesShells) {
    const TorusGrauertTube t(2, 0.5);
    const auto shells = lattice_shells(2, 30.0);
    const double cutoff = t.eigenvalue(std::sqrt(500.0));
    std::int64_t expected = 0;
    for (const auto& s : shells)
        if (s.norm_sq <= 500) expected += s.count;
    EXPECT_EQ(t.count_up_to(cutoff), expected);
    const auto lines = t.spectrum_up_to(cutoff);
    std::int64_t total = 0;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        total += lines[i].multiplicity;
        if (i) {
            EXPECT_LT(lines[i - 1].lambda, lines[i].lambda);
        }
    }
    EXPECT_EQ(total, expected);
    const auto window = t.spectrum_in(t.eigenvalue(10.0), t.eigenvalue(20.0));
    std::int64_t in_window = 0;
    for (const auto& s : shells)
        if (s.norm_sq > 100 && s.norm_sq < 400) in_window += s.count;
    std::int64_t w = 0;
    for (const auto& l : window) w += l.multiplicity;
    EXPECT_EQ(w, in_window);
}

TEST(Torus, EigenfunctionLogExamples) {
    const TorusGrauertTube t(2, 0.5);
    const auto p = t.point({0.0, 0.0}, {1.0, 0.0});
    const auto zero = t.eigenfunction_log({0, 0}, p);
    EXPECT_NEAR(zero.log_modulus, -std::log(2 * std::numbers::pi) - 0.5 * (std::log(0.5) + std::log(std::numbers::pi) + std::log(2.0)),
                1e-13);
    EXPECT_EQ(zero.phase, 0.0);
    const auto e = t.eigenfunction_log({1, 0}, p);
    const double expected = -0.5 - std::log(2 * std::numbers::pi) -
                            0.5 * (-std::log(2.0) + std::log(std::numbers::pi * specfun::bessel_i(0, 1.0)) + std::log(2.0));
    EXPECT_NEAR(e.log_modulus, expected, 1e-13);
}

TEST(Torus, EigenfunctionInvariances) {
    const TorusGrauertTube t(3, 0.8);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const std::vector<std::int64_t> m{3, -1, 2};
        const auto p = t.point({1.0 + u(rng), 2.0 + u(rng), 3.0 + u(rng)}, {u(rng), u(rng), u(rng)});
        const std::vector<double> a{0.3, -0.2, 0.1};
        PointX q = p;
        for (int j = 0; j < 3; ++j) q.x[j] += a[j];
        const auto ep = t.eigenfunction_log(m, p), eq = t.eigenfunction_log(m, q);
        EXPECT_EQ(ep.log_modulus, eq.log_modulus);
        double shift = std::remainder(eq.phase - ep.phase - (3 * 0.3 + 1 * 0.2 + 2 * 0.1), 2 * std::numbers::pi);
        EXPECT_NEAR(shift, 0.0, 1e-12);
        // joint permutation of (m, x, y)
        PointX r{{p.x[2], p.x[0], p.x[1]}, {p.y[2], p.y[0], p.y[1]}};
        const auto er = t.eigenfunction_log({2, 3, -1}, r);
        EXPECT_NEAR(er.log_modulus, ep.log_modulus, 1e-13);
        EXPECT_NEAR(std::remainder(er.phase - ep.phase, 2 * std::numbers::pi), 0.0, 1e-12);
    }
}

TEST(Torus, NoOverflowAtLargeModes) {
    const TorusGrauertTube t(2, 0.5);
    const auto p = t.point({0.0, 0.0}, {-1.0, 0.0});
    const auto e = t.eigenfunction_log({10000, 0}, p);
    EXPECT_TRUE(std::isfinite(e.log_modulus));
}

TEST(Torus, PointValidation) {
    const TorusGrauertTube t(2, 0.5);
    EXPECT_THROW(t.check_point({{0, 0}, {0.5, 0.1}}), ValidationError);
    EXPECT_THROW(t.point({0, 0}, {0, 0}), ValidationError);
    EXPECT_THROW(t.point({0, 0, 0}, {1, 0}), ValidationError);
    EXPECT_THROW(TorusGrauertTube(1, 0.5), ValidationError);
    EXPECT_THROW(TorusGrauertTube(2, 0.0), ValidationError);
    EXPECT_THROW(operator_variant_from("cr"), ValidationError);
}

TEST(Torus, Orthonormality) {
    const TorusGrauertTube t2(2, 0.5);
    EXPECT_LE(t2.orthonormality_residual({0, 0}, {0, 0}), 1e-10);
    EXPECT_LE(t2.orthonormality_residual({1, 0}, {2, 0}), 1e-10);
    EXPECT_LE(t2.orthonormality_residual({1, 0}, {1, 0}), 1e-8);
    EXPECT_LE(t2.orthonormality_residual({3, -2}, {3, -2}, {8, 128}), 1e-8);
    const TorusGrauertTube t3(3, 0.5);
    EXPECT_LE(t3.orthonormality_residual({1, 1, 0}, {1, 1, 0}, {8, 32}), 1e-8);
    EXPECT_LE(t3.orthonormality_residual({1, 0, 0}, {0, 1, 0}, {8, 32}), 1e-10);
    EXPECT_THROW(TorusGrauertTube(4, 0.5).orthonormality_residual({0, 0, 0, 0}, {0, 0, 0, 0}), ValidationError);
    EXPECT_THROW(t2.orthonormality_residual({0, 0}, {0, 0}, {2, 64}), ValidationError);
}

TEST(Torus, SphereRuleWeights) {
    const auto r2 = sphere_rule(2, 16);
    EXPECT_NEAR(std::accumulate(r2.weights.begin(), r2.weights.end(), 0.0), 2 * std::numbers::pi, 1e-13);
    const auto r3 = sphere_rule(3, 12);
    EXPECT_NEAR(std::accumulate(r3.weights.begin(), r3.weights.end(), 0.0), 4 * std::numbers::pi, 1e-12);
    try {
        sphere_rule(5, 8);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("n = 2 and n = 3"), std::string::npos);
    }
}

TEST(Geometry, ReebAndXi) {
    const TorusGrauertTube t(3, 0.6, OperatorVariant::reeb);
    const auto g = t.geometry_constants();
    EXPECT_EQ(g.sigma_p_xi, 1.0);
    EXPECT_EQ(TorusGrauertTube(3, 0.6).geometry_constants().sigma_p_xi, 0.6);
    std::mt19937_64 rng(11);
    std::normal_distribution<double> nd;
    for (int i = 0; i < 100; ++i) {
        const auto p = t.point({0.0, 0.0, 0.0}, {nd(rng), nd(rng), nd(rng)});
        const auto xi = g.xi_at(p), r = g.reeb_at(p);
        double pair = 0.0;
        for (int j = 0; j < 3; ++j) pair += xi[j] * r[j];
        EXPECT_NEAR(pair, 1.0, 1e-14);
    }
}

TEST(Geometry, ContactDensityOracle) {
    // reference point of the n = 2, eps = 0.5 example
    EXPECT_NEAR(contact_density(2, {0.5, 0.0}), 0.25, 1e-15);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    for (int n : {2, 3}) {
        for (double eps : {0.5, 1.3}) {
            const auto g = TorusGrauertTube(n, eps).geometry_constants();
            for (int i = 0; i < 10; ++i) {
                std::vector<double> y(n);
                double r = 0.0;
                for (auto& v : y) v = nd(rng), r += v * v;
                for (auto& v : y) v *= eps / std::sqrt(r);
                EXPECT_NEAR(contact_density(n, y), g.dvxi_over_dv, 1e-13) << n << ' ' << eps;
            }
        }
    }
}

TEST(Geometry, LimitConstantFromGeometry) {
    for (int n : {2, 3, 4})
        for (double eps : {0.3, 0.5, 2.0})
            for (auto v : {OperatorVariant::grauert, OperatorVariant::reeb}) {
                const TorusGrauertTube t(n, eps, v);
                EXPECT_NEAR(t.limit_constant_from_geometry() / *t.limit_constant(), 1.0, 1e-13);
            }
}

TEST(Torus, ParsevalTwoPointSphere) {
    const double eps = 0.5;
    const TorusGrauertTube t(2, eps);
    const auto p = t.point({0.4, 1.1}, {0.6, -0.8});
    CompensatedSum via_log, direct;
    const int M = 12;
    for (int a = -M; a <= M; ++a)
        for (int b = -M; b <= M; ++b) {
            if (a * a + b * b > M * M) continue;
            via_log.add(std::exp(2.0 * t.eigenfunction_log({a, b}, p).log_modulus));
            const double norm = std::hypot(a, b);
            const double normalizer = 4 * std::numbers::pi * std::numbers::pi * eps *
                                      specfun::gamma(2, 2 * eps * norm) * 2.0;
            direct.add(std::exp(-2.0 * (a * p.y[0] + b * p.y[1])) / normalizer);
        }
    EXPECT_NEAR(via_log.value() / direct.value(), 1.0, 1e-12);
}

TEST(CircleBundle, Examples) {
    const auto cp1 = projective_space(1);
    EXPECT_EQ(cp1.hilbert_multiplicity(1), 2);
    EXPECT_EQ(cp1.hilbert_multiplicity(7), 8);
    EXPECT_EQ(projective_space(2).hilbert_multiplicity(3), 10);
    int monomials = 0;
    for (int a = 0; a <= 3; ++a)
        for (int b = 0; a + b <= 3; ++b) ++monomials;
    EXPECT_EQ(monomials, 10);
    const auto lines = cp1.spectrum_up_to(3.5);
    ASSERT_EQ(lines.size(), 3u);
    for (int i = 0; i < 3; ++i) {
        EXPECT_EQ(lines[i].lambda, i + 1.0);
        EXPECT_EQ(lines[i].multiplicity, i + 2);
    }
    EXPECT_EQ(*cp1.limit_constant(), 1.0);
    EXPECT_NEAR(*projective_space(3).limit_constant(), 1.0 / 6.0, 1e-16);
}

TEST(CircleBundle, Validity) {
    const CircleBundleModel half(1, {parse_rational("0"), parse_rational("1/2")});
    EXPECT_THROW(half.hilbert_multiplicity(1), ModelValidityError);
    EXPECT_EQ(half.hilbert_multiplicity(2), 1);
    const CircleBundleModel neg(1, {Rational(-5), Rational(1)});
    EXPECT_THROW(neg.hilbert_multiplicity(3), ModelValidityError);
    EXPECT_THROW(CircleBundleModel(1, {Rational(1), Rational(-1)}), ModelValidityError);
    EXPECT_THROW(CircleBundleModel(2, {Rational(1), Rational(1)}), ValidationError);
    EXPECT_THROW(half.hilbert_multiplicity(0), ValidationError);
}

TEST(Rational, Parse) {
    const auto r = parse_rational("6/4");
    EXPECT_EQ(static_cast<long long>(r.num), 3);
    EXPECT_EQ(static_cast<long long>(r.den), 2);
    EXPECT_EQ(parse_rational("-3").to_double(), -3.0);
    EXPECT_THROW(parse_rational("1/0"), ValidationError);
    EXPECT_THROW(parse_rational("x"), ValidationError);
    EXPECT_THROW(parse_rational("1/2z"), ValidationError);
}

TEST(Tabulated, SortsAndValidates) {
    const TabulatedSpectrum t(1, {{3.0, 1}, {1.0, 2}, {2.0, 5}});
    const auto l = t.spectrum_up_to(2.5);
    ASSERT_EQ(l.size(), 2u);
    EXPECT_EQ(l[0].multiplicity, 2);
    EXPECT_EQ(t.count_up_to(10.0), 8);
    EXPECT_THROW(TabulatedSpectrum(1, {{0.0, 1}}), ModelValidityError);
}
