// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "skewrg/am.hpp"

using namespace skewrg;

namespace {

const double kAlpha = golden<double>();

MatrixFn<double> random_mf(std::mt19937& rng, int N, double rho, double scale = 0.1) {
    std::uniform_real_distribution<double> U(-1, 1);
    MatrixFn<double> m = MatrixFn<double>::identity(N, rho);
    for (Series<double>* s : {&m.t, &m.u, &m.v, &m.s})
        for (int n = 0; n <= N; ++n) (*s)[n] += scale * U(rng) / std::pow(2 * rho, n);
    return m;
}

// coefficient part only; tails are bounds and do not cancel under subtraction
double cnorm(const MatrixFn<double>& m) {
    return s_norm_bound(m.t) + s_norm_bound(m.u) + s_norm_bound(m.v) + s_norm_bound(m.s);
}

double mat_dist(const Mat2<double>& x, const Mat2<double>& y) {
    return std::max({std::fabs(x.a - y.a), std::fabs(x.b - y.b), std::fabs(x.c - y.c), std::fabs(x.d - y.d)});
}

}  // namespace

TEST_CASE("composition with the identity shifts the inner map") {
    std::mt19937 rng(1);
    SkewMap<double> id{0.0, MatrixFn<double>::identity(12, 2.0)};
    SkewMap<double> a{0.3, random_mf(rng, 12, 2.0)};
    SkewMap<double> c = sk_compose(id, a, 1.5);
    CHECK(c.alpha == doctest::Approx(0.3));
    for (double x : {-1.2, 0.0, 0.7}) CHECK(mat_dist(mf_eval(c.m, x), mf_eval(a.m, x)) < 1e-13);
}

TEST_CASE("composition of constant matrices") {
    SkewMap<double> a{0.25, MatrixFn<double>::constant(6, 2.0, 1.5, 0.3, -0.2, 0.4)};
    SkewMap<double> b{0.5, MatrixFn<double>::constant(6, 2.0, 0.8, -0.1, 0.6, 0.2)};
    SkewMap<double> c = sk_compose(b, a, 1.0);
    CHECK(c.alpha == doctest::Approx(0.75));
    Mat2<double> want = mf_eval(b.m, 0.0) * mf_eval(a.m, 0.0);
    CHECK(mat_dist(mf_eval(c.m, 0.3), want) < 1e-14);
}

TEST_CASE("the AM pair commutes") {
    Pair<double> p = am_pair<double>(1.0, 2.3, kAlpha / 2, kAlpha, 80, 3.0, 2.0);
    SkewMap<double> fg = sk_compose(p.F, p.G, 1.0), gf = sk_compose(p.G, p.F, 1.0);
    CHECK(cnorm(mf_sub(fg.m, gf.m)) < 1e-12 * cnorm(fg.m));
    CHECK(fg.alpha == doctest::Approx(gf.alpha));
}

TEST_CASE("inverse through the adjugate") {
    SkewMap<double> id{0.0, MatrixFn<double>::identity(8, 1.0)};
    SkewMap<double> inv = sk_inverse(id);
    CHECK(mf_norm(mf_sub(inv.m, id.m)) == 0.0);

    std::mt19937 rng(2);
    std::uniform_real_distribution<double> U(-1, 1);
    SkewMap<double> h{0.4, random_mf(rng, 16, 2.0, 0.5)};
    SkewMap<double> hi = sk_inverse(h);
    CHECK(hi.alpha == -0.4);
    double worst = 0;
    for (int k = 0; k < 20; ++k) {
        double x = 1.9 * U(rng);
        Mat2<double> A = mf_eval(h.m, x), P = A * mf_eval(hi.m, x);
        double d = A.det();
        worst = std::max(worst, mat_dist(P, {d, 0, 0, d}));
    }
    CHECK(worst < 1e-12);

    MatrixFn<double> rev = mf_project_reversible(h.m);
    CHECK(mf_parity_drift(sk_inverse(SkewMap<double>{0.4, rev}).m) == 0.0);
}

TEST_CASE("G F G") {
    std::mt19937 rng(3);
    SkewMap<double> g{0.3, random_mf(rng, 20, 2.0)};
    SkewMap<double> id{0.0, MatrixFn<double>::identity(20, 3.0)};
    SkewMap<double> gg = sk_gfg(id, g, 1.0);
    SkewMap<double> g2 = sk_compose(g, g, 1.0);
    CHECK(cnorm(mf_sub(gg.m, g2.m)) < 1e-12);
    CHECK(gg.alpha == doctest::Approx(0.6));

    SkewMap<double> cf{0.1, MatrixFn<double>::constant(6, 3.0, 1.1, 0.2, -0.3, 0.1)};
    SkewMap<double> cg{0.2, MatrixFn<double>::constant(6, 3.0, 0.9, 0.4, 0.1, -0.2)};
    Mat2<double> G = mf_eval(cg.m, 0.0), F = mf_eval(cf.m, 0.0);
    CHECK(mat_dist(mf_eval(sk_gfg(cf, cg, 1.0).m, 0.5), G * F * G) < 1e-14);

    // the AM cosine has weighted norm ~1e5 on radius 2, so the pipeline precision is used
    const quad qa = golden<quad>();
    Pair<quad> p = am_pair<quad>(1, quad(2.5), qa / 2, qa, 80, 3.0, 2.0);
    SkewMap<quad> r = sk_gfg(p.F, p.G, 1.0);
    CHECK(mf_parity_drift(r.m) < 1e-11);
}

TEST_CASE("normalization") {
    // product of two shears has unit determinant in exact arithmetic
    MatrixFn<double> up = MatrixFn<double>::identity(12, 1.0), lo = up;
    up.u[1] = 0.3;
    up.u[2] = -0.1;
    lo.v[0] = 0.2;
    lo.v[3] = 0.05;
    SkewMap<double> sl{0.1, mf_mul(up, lo)};
    SkewMap<double> n = sk_normalize(sl);
    CHECK(cnorm(mf_sub(n.m, sl.m)) < 1e-14 * cnorm(sl.m));

    SkewMap<double> two{0.0, MatrixFn<double>::constant(10, 1.0, 2.0, 0.0, 0.0, 0.0)};
    // det = 4 sits outside the convergence disk of the series in det - 1
    CHECK_THROWS_AS(sk_normalize(two), DomainError);
    SkewMap<double> small{0.0, MatrixFn<double>::constant(10, 1.0, 1.2, 0.0, 0.0, 0.0)};
    SkewMap<double> ns = sk_normalize(small);
    CHECK(ns.m.t[0] == doctest::Approx(1.0).epsilon(1e-14));

    std::mt19937 rng(4);
    SkewMap<double> h{0.2, random_mf(rng, 16, 1.5, 0.05)};
    MatrixFn<double> dA = random_mf(rng, 16, 1.5, 0.5);
    dA = mf_sub(dA, MatrixFn<double>::identity(16, 1.5));
    MatrixFn<double> an = sk_dnormalize(h, dA);
    const double eps = 1e-6;
    SkewMap<double> hp{h.alpha, mf_add(h.m, mf_scale(dA, eps))}, hm{h.alpha, mf_sub(h.m, mf_scale(dA, eps))};
    MatrixFn<double> fd = mf_scale(mf_sub(sk_normalize(hp).m, sk_normalize(hm).m), 1 / (2 * eps));
    CHECK(cnorm(mf_sub(an, fd)) < 1e-8 * cnorm(an));
}

TEST_CASE("equalizing exponent") {
    SkewMap<double> h{0.0, MatrixFn<double>::constant(4, 1.0, 1.0, 2.0, -2.0, 0.0)};
    CHECK(sk_equalize_sigma(h) == 0.0);
    h.m.u[0] = 4.0;
    h.m.v[0] = 1.0;
    CHECK(sk_equalize_sigma(h) == doctest::Approx(std::log(2.0) / 2));
    h.m.v[0] = 0.0;
    CHECK_THROWS_AS(sk_equalize_sigma(h), DomainError);
}

TEST_CASE("scaling") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> U(-1, 1);
    SkewMap<double> h{0.7, random_mf(rng, 14, 2.0, 0.4)};
    SkewMap<double> s = sk_scale(h, 1.0, 0.0, 2.0);
    double worst = 0;
    for (int k = 0; k < 20; ++k) {
        double x = 1.9 * U(rng);
        Mat2<double> A = mf_eval(h.m, x);
        // S = diag(1, -1) in the new basis
        Mat2<double> want{A.a, -A.b, -A.c, A.d};
        worst = std::max(worst, mat_dist(mf_eval(s.m, x), want));
    }
    CHECK(worst < 1e-13);

    SkewMap<double> id{0.3, MatrixFn<double>::identity(8, 2.0)};
    SkewMap<double> si = sk_scale(id, 0.5, 0.37, 2.0);
    CHECK(mf_norm(mf_sub(si.m, MatrixFn<double>::identity(8, 2.0))) < 1e-15);

    const double a3 = kAlpha * kAlpha * kAlpha;
    SkewMap<double> r{a3, MatrixFn<double>::identity(8, 2.0)};
    CHECK(sk_scale(r, a3, 0.0, 2.0).alpha == doctest::Approx(1.0));
    CHECK_THROWS_AS(sk_scale(r, 1.5, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("reversibility is closed under the skew operations") {
    std::mt19937 rng(6);
    MatrixFn<double> a = mf_project_reversible(random_mf(rng, 20, 2.0, 0.1));
    MatrixFn<double> b = mf_project_reversible(random_mf(rng, 20, 3.0, 0.1));
    SkewMap<double> G{kAlpha, a}, F{1.0, b};
    CHECK(mf_parity_drift(sk_inverse(G).m) == 0.0);
    SkewMap<double> gfg = sk_gfg(F, G, 1.0);
    CHECK(mf_parity_drift(gfg.m) < 1e-12 * cnorm(gfg.m));
    CHECK(mf_parity_drift(sk_scale(G, kAlpha, 0.2, 2.0).m) == 0.0);
    CHECK(mf_parity_drift(sk_normalize(G).m) < 1e-13 * cnorm(G.m));
}
