// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "skewrg/am.hpp"
#include "skewrg/commands.hpp"
#include "skewrg/io.hpp"

using namespace skewrg;

namespace {

const double kAlpha = golden<double>();

struct Fixed {
    SolveResult sol;
    Fixed() {
        BootstrapOptions o;
        sol = solve_fixed_point(bootstrap_Estar(o).seed, SolveOptions{});
    }
};

const Fixed& fixed() {
    static const Fixed f;
    return f;
}

const Jacobian& fixed_jacobian() {
    static const Jacobian J = build_jacobian(fixed().sol.pair, Operator::full, JacMethod::dual);
    return J;
}

double l1(const std::vector<quad>& x) {
    double s = 0;
    for (const quad& v : x) s += double(fabsq(v));
    return s;
}

double coef_norm(const Pair<quad>& p) {
    double s = 0;
    for (const MatrixFn<quad>* m : {&p.F.m, &p.G.m})
        s += s_norm_bound(m->t) + s_norm_bound(m->u) + s_norm_bound(m->v) + s_norm_bound(m->s);
    return s;
}

Pair<quad> am(double E) {
    const quad a = golden<quad>();
    return am_pair<quad>(1, quad(E), a / 2, a, 80, 3.0, 2.0);
}

double commutator_defect(const Pair<quad>& p) {
    MatrixFn<quad> C = commutator(p);
    MatrixFn<quad> d = mf_sub(C, MatrixFn<quad>::identity(C.degree(), C.rho()));
    return s_norm_bound(d.t) + s_norm_bound(d.u) + s_norm_bound(d.v) + s_norm_bound(d.s);
}

}  // namespace

TEST_CASE("domain conditions") {
    CHECK_FALSE(three_domain_violation(3.0, 2.0));
    CHECK_FALSE(three_domain_violation(2.5, 1.8));
    auto v = three_domain_violation(3.0, 0.4);
    REQUIRE(v);
    CHECK(v->find("violated") != std::string::npos);
    CHECK_FALSE(single_domain_violation(3.0, 2.0));
    CHECK(single_domain_violation(3.0, 0.4));
}

TEST_CASE("single step") {
    Pair<quad> p = am(2.4);
    RGResult<quad> r = rg_single(p);
    CHECK(double(r.pair.F.alpha) == 1.0);
    CHECK(double(r.pair.G.alpha) == doctest::Approx(kAlpha));
    // the new F is the old G rescaled, so it carries the x-dependence of the potential
    double nonconst = 0;
    for (int n = 1; n <= r.pair.F.m.degree(); ++n) nonconst += double(fabsq(r.pair.F.m.t[n]));
    CHECK(nonconst > 1e-3);
    CHECK(commutator_defect(p) < 1e-10);
    CHECK(commutator_defect(r.pair) < 1e-10);
    CHECK(r.parity_drift < 1e-20);
}

TEST_CASE("palindromic three-step agrees with three single steps on commuting pairs") {
    Pair<quad> p = am(2.5975151853767716);
    Pair<quad> q = p;
    quad s = 0;
    for (int i = 0; i < 3; ++i) {
        RGResult<quad> r = rg_single(q);
        q = r.pair;
        s += r.sigma;
    }
    RGResult<quad> r3 = rg_three_palindromic(p);
    CHECK(double(r3.pair.G.alpha) == doctest::Approx(kAlpha));
    CHECK(double(r3.pair.F.alpha) == 1.0);
    CHECK(double(fabsq(r3.sigma - s)) < 1e-8);
    Pair<quad> qr = pair_resize(q, 80, 3.0, 2.0);
    CHECK(coef_norm(pair_sub(r3.pair, qr)) < 1e-8 * coef_norm(qr));
}

TEST_CASE("palindromic step keeps reversible non-commuting pairs reversible") {
    Pair<quad> p = fixed().sol.pair;
    std::mt19937 rng(4);
    std::normal_distribution<double> g(0, 1);
    for (int n = 0; n <= 10; n += 2) {
        p.G.m.t[n] += quad(1e-6 * g(rng));
        p.F.m.u[n] += quad(1e-6 * g(rng));
    }
    p.G.m.s[3] += quad(1e-6);
    CHECK(commutator_defect(p) > 1e-9);
    RGResult<quad> r = rg_three_palindromic(p);
    CHECK(r.parity_drift < 1e-10);
}

TEST_CASE("full operator normalizes determinants") {
    Pair<quad> p = fixed().sol.pair;
    p.G.m.t[0] *= quad(1.001);
    RGResult<quad> r = rg_full(p);
    CHECK(r.det_drift > 1e-4);
    for (const SkewMap<quad>* h : {&r.pair.F, &r.pair.G}) {
        Series<quad> d = mf_det(h->m);
        d[0] -= 1;
        for (double x : {-0.9, -0.3, 0.0, 0.4, 0.8}) CHECK(double(fabsq(s_eval(d, quad(x * h->m.rho()))) < 1e-12));
    }
    RGResult<quad> ru = rg_full(fixed().sol.pair);
    CHECK(ru.det_drift < 1e-12);
    RGResult<quad> r3 = rg_three_palindromic(fixed().sol.pair);
    CHECK(coef_norm(pair_sub(ru.pair, r3.pair)) < 1e-12);
}

TEST_CASE("fixed point") {
    const SolveResult& s = fixed().sol;
    quad es = expq(s.sigma);
    CHECK(double(fabsq(es - parse_scalar<quad>(kExpSigmaStarDecimal))) < 1e-10);
    CHECK(s.residual < 1e-11);
    RGResult<quad> r = rg_full(s.pair);
    CHECK(double(pair_norm(pair_sub(r.pair, s.pair))) < 1e-10);
    CHECK(double(fabsq(r.sigma - s.sigma)) < 1e-15);
}

TEST_CASE("fixed point does not depend on the radii") {
    const SolveResult& s = fixed().sol;
    SolveResult t = solve_fixed_point(pair_resize(s.pair, 80, 2.5, 1.8), SolveOptions{});
    CHECK(t.residual < 1e-11);
    CHECK(double(fabsq(t.sigma - s.sigma)) < 1e-9);
}

TEST_CASE("sigma* does not depend on the normalization rule") {
    // |u0(0)| = r |v0(0)| in place of equality, continued from r = 1 to stay on the same branch
    Pair<quad> p = fixed().sol.pair;
    for (double r : {1.1, 1.2, 1.3, 1.4, 1.5}) {
        SolveOptions o;
        o.ratio = r;
        SolveResult t = solve_fixed_point(p, o);
        CHECK(t.residual < 1e-11);
        CHECK(double(fabsq(t.sigma - fixed().sol.sigma)) < 1e-10);
        p = t.pair;
    }
    CHECK(double(p.G.m.u[0] / p.G.m.v[0]) != doctest::Approx(double(fixed().sol.pair.G.m.u[0] / fixed().sol.pair.G.m.v[0])));
}

TEST_CASE("Jacobian columns: dual numbers against central differences") {
    const Pair<quad>& p = fixed().sol.pair;
    Chart ch = chart_of(p);
    // high-order columns are far below the finite-difference floor, so the error is measured
    // against the operator 1-norm of the Jacobian
    const Jacobian& J = fixed_jacobian();
    double scale = 0;
    for (int j = 0; j < J.n; ++j) {
        double c = 0;
        for (int i = 0; i < J.n; ++i) c += std::fabs(J(i, j));
        scale = std::max(scale, c);
    }
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> col(0, ch.size() - 1);
    for (int k = 0; k < 10; ++k) {
        int j = col(rng);
        std::vector<double> a = jacobian_column(p, Operator::full, JacMethod::dual, j);
        std::vector<double> b = jacobian_column(p, Operator::full, JacMethod::central_fd, j);
        double diff = 0, na = 0;
        for (size_t i = 0; i < a.size(); ++i) {
            diff += std::fabs(a[i] - b[i]);
            na += std::fabs(a[i]);
        }
        INFO("column " << j << ", column norm " << na);
        CHECK(diff <= 1e-6 * std::max(na, scale));
    }
}

TEST_CASE("Jacobian predicts first-order changes") {
    const Pair<quad>& p = fixed().sol.pair;
    Chart ch = chart_of(p);
    Jacobian J = build_jacobian(p, Operator::full, JacMethod::central_fd);
    std::vector<quad> x = to_vec(p), fx = op_vec(x, ch, Operator::full);
    std::mt19937 rng(8);
    std::normal_distribution<double> g(0, 1);
    std::vector<double> h(x.size());
    double nh = 0;
    for (double& v : h) nh += std::fabs(v = g(rng));
    for (double& v : h) v /= nh;
    auto remainder = [&](double eps) {
        std::vector<quad> y = x;
        for (size_t i = 0; i < y.size(); ++i) y[i] += quad(eps * h[i]);
        std::vector<quad> fy = op_vec(y, ch, Operator::full);
        double r = 0;
        for (int i = 0; i < J.n; ++i) {
            double jh = 0;
            for (int k = 0; k < J.n; ++k) jh += J(i, k) * h[k];
            r += std::fabs(double(fy[i] - fx[i]) - eps * jh);
        }
        return r;
    };
    double r1 = remainder(1e-4), r2 = remainder(5e-5);
    CHECK(r2 / r1 == doctest::Approx(0.25).epsilon(0.1));
}

TEST_CASE("quasi-Newton map and contraction estimate") {
    const Pair<quad>& p = fixed().sol.pair;
    ResolventSolver K(fixed_jacobian());
    std::vector<quad> zero(size_t(K.size()), quad(0));
    double m0 = l1(quasi_newton_map(p, K, zero));
    std::vector<quad> fx = op_vec(to_vec(p), chart_of(p), Operator::full), x = to_vec(p);
    double res = 0;
    for (size_t i = 0; i < x.size(); ++i) res += double(fabsq(fx[i] - x[i]));
    CHECK(m0 == doctest::Approx(res).epsilon(1e-6));
    CHECK(m0 < 1e-11);

    const double delta = 1e-10;
    ContractionEstimate est = contraction_estimate(p, K, delta, 20, 7);
    CHECK(est.K < 0.75);
    CHECK(est.epsilon + est.K * delta < delta);
    CHECK(est.ok());
}

TEST_CASE("commutator at the fixed point") {
    const SolveResult& s = fixed().sol;
    CHECK(commutator_defect(s.pair) < 1e-9);
    CHECK(commutator_recursion_residual(s.pair, s.sigma) < 1e-9);
    AiCiReport a = check_aici(s.pair, s.sigma);
    CHECK(std::fabs(std::fabs(a.detA1) - 1) < 1e-10);
    CHECK(std::abs(a.theta1 * a.theta2 - a.detA1) < 1e-10);
    CHECK(std::abs(a.c1 - 1.0) < 1e-6);
    CHECK(std::abs(a.c2 - 1.0) < 1e-6);
    CHECK(a.c_ok());
    INFO("A1(0) eigenvalues " << a.theta1 << ", " << a.theta2 << ", det " << a.detA1);
    CHECK(a.theta_ok());
}

TEST_CASE("linearization spectrum") {
    const SolveResult& s = fixed().sol;
    const double sigma = double(s.sigma);
    auto leading = [](const std::vector<Eigenvalue>& sp) {
        std::vector<double> v;
        for (const Eigenvalue& e : sp)
            if (e.tag != "eta_0" && v.size() < 5) v.push_back(e.z.real());
        return v;
    };
    std::vector<Eigenvalue> sp = jacobian_spectrum(fixed_jacobian());
    std::vector<FamilyCheck> fam = classify_trivial_eigenvalues(sp, sigma, 2);
    std::vector<double> l = leading(sp);
    REQUIRE(l.size() == 5);
    CHECK(std::fabs(l[0] - kMu[0]) < 1e-6);
    CHECK(std::fabs(l[1] - kMu[1]) < 1e-6);
    CHECK(std::fabs(std::fabs(l[2]) - kMu[2]) < 1e-6);
    CHECK(std::fabs(std::fabs(l[3]) - kMu[2]) < 1e-6);
    CHECK(l[2] * l[3] < 0);
    CHECK(std::fabs(l[4] - kMu[4]) < 1e-6);
    CHECK(std::fabs(l[1] - 1 / (kAlpha * kAlpha * kAlpha)) < 1e-8);
    CHECK(sp[0].tag == "nontrivial");
    CHECK(sp[1].tag == "nontrivial");

    // truncation stability
    SolveResult s60 = solve_fixed_point(pair_resize(s.pair, 60, 3.0, 2.0), SolveOptions{});
    std::vector<Eigenvalue> sp60 = jacobian_spectrum(build_jacobian(s60.pair, Operator::full, JacMethod::dual));
    classify_trivial_eigenvalues(sp60, double(s60.sigma), 2);
    std::vector<double> l60 = leading(sp60);
    REQUIRE(l60.size() == 5);
    // the +-0.682 pair is degenerate in modulus, so its order is not fixed
    for (int i = 0; i < 5; ++i) CHECK(std::fabs(std::fabs(l60[i]) - std::fabs(l[i])) < 1e-6);
    CHECK(l60[2] * l60[3] < 0);

    // trivial families with n = 1, 2 in the normalized or the unnormalized spectrum
    std::vector<Eigenvalue> sp3 = jacobian_spectrum(build_jacobian(s.pair, Operator::three, JacMethod::dual));
    std::vector<FamilyCheck> fam3 = classify_trivial_eigenvalues(sp3, sigma, 2);
    for (size_t i = 0; i < fam.size(); ++i) {
        if (fam[i].n == 0) continue;
        INFO(fam[i].family << "_" << fam[i].n << " = " << fam[i].predicted << ", closest " << fam[i].closest);
        CHECK((fam[i].present || fam3[i].present));
    }
}
