// SPDX-License-Identifier: Apache-2.0
#include "skewrg/rg.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cstdio>
#include <memory>
#include <random>
#include <sstream>

namespace skewrg {

namespace {

std::string fmt(double x) {
    char b[32];
    std::snprintf(b, sizeof b, "%.6g", x);
    return b;
}

const double kAlpha = (std::sqrt(5.0) - 1) / 2;

}  // namespace

std::optional<std::string> single_domain_violation(double rf, double rg) {
    const double a = kAlpha;
    if (a * rf > rg) return "alpha*rho_F <= rho_G violated: " + fmt(a * rf) + " > " + fmt(rg);
    if (a * rg + a / 2 > rf) return "alpha*rho_G + alpha/2 <= rho_F violated: " + fmt(a * rg + a / 2) + " > " + fmt(rf);
    if (a * rg + 0.5 > rg) return "alpha*rho_G + 1/2 <= rho_G violated: " + fmt(a * rg + 0.5) + " > " + fmt(rg);
    return std::nullopt;
}

std::optional<std::string> three_domain_violation(double rf, double rg) {
    const double a = kAlpha, a2 = a * a, a3 = a2 * a;
    if (!(rf > 0) || !(rg > 0)) return "radii must be positive";
    if (a3 * rg + a2 > rg) return "rho_G >= 1/2 violated (alpha^3 rho_G + alpha^2 <= rho_G): rho_G = " + fmt(rg);
    if (a3 * rf + a2 / 2 > rg)
        return "rho_F <= alpha^-3 rho_G - alpha^-1/2 violated: rho_F = " + fmt(rf) + " > " + fmt((rg - a2 / 2) / a3);
    if (a3 * rg + a2 / 2 > rf)
        return "alpha^3 rho_G + alpha^2/2 <= rho_F violated: " + fmt(a3 * rg + a2 / 2) + " > " + fmt(rf);
    return std::nullopt;
}

template <class T>
RGResult<T> rg_single(const Pair<T>& p, double ratio) {
    const T al = golden<T>();
    const double rf = p.rho_f(), rg = p.rho_g();
    if (auto v = single_domain_violation(rf, rg)) throw DomainError("single-step domain: " + *v);
    T sigma = sk_equalize_sigma(p.G, ratio);
    SkewMap<T> nf = sk_scale(p.G, al, sigma, rf);
    SkewMap<T> fg = sk_compose(p.F, sk_inverse(p.G), num::to_double(al) * rg);
    SkewMap<T> ng = sk_scale(fg, al, sigma, rg);
    nf.alpha = T(1);
    ng.alpha = al;
    RGResult<T> r{{nf, ng}, sigma};
    r.parity_drift = pair_parity_drift(r.pair);
    return r;
}

template <class T>
RGResult<T> rg_three_palindromic(const Pair<T>& p, double ratio) {
    const T al = golden<T>(), a2 = al * al, c = a2 * al, h = a2 / T(2);
    const double rf = p.rho_f(), rg = p.rho_g();
    if (auto v = three_domain_violation(rf, rg)) throw DomainError("three-step domain: " + *v);
    const MatrixFn<T>&A = p.G.m, &B = p.F.m;
    auto a_at = [&](const T& shift, double ro) { return mf_affine(A, c, shift, ro); };
    auto b_at = [&](const T& shift, double ro) { return mf_affine(B, c, shift, ro); };

    // G F^-1 G and G^-1 F G^-1 F G^-1 in translated coordinates
    MatrixFn<T> hf = mf_mul(mf_mul(a_at(-h, rf), mf_adj(b_at(T(0), rf))), a_at(h, rf));
    MatrixFn<T> hg = mf_mul(mf_adj(a_at(a2, rg)), b_at(h, rg));
    hg = mf_mul(hg, mf_adj(a_at(T(0), rg)));
    hg = mf_mul(hg, b_at(-h, rg));
    hg = mf_mul(hg, mf_adj(a_at(-a2, rg)));

    SkewMap<T> HF{T(1), hf}, HG{al, hg};
    T sigma = sk_equalize_sigma(HF, ratio);
    SkewMap<T> nf = sk_scale(HF, T(1), sigma, rf);
    SkewMap<T> ng = sk_scale(HG, T(1), sigma, rg);
    nf.alpha = T(1);
    ng.alpha = al;
    RGResult<T> r{{nf, ng}, sigma};
    r.parity_drift = pair_parity_drift(r.pair);
    return r;
}

template <class T>
RGResult<T> rg_full(const Pair<T>& p, double ratio) {
    RGResult<T> r = rg_three_palindromic(p, ratio);
    Series<T> df = mf_det(r.pair.F.m), dg = mf_det(r.pair.G.m);
    df[0] -= T(1);
    dg[0] -= T(1);
    r.det_drift = std::max(s_norm_bound(df), s_norm_bound(dg));
    r.pair.F = sk_normalize(r.pair.F);
    r.pair.G = sk_normalize(r.pair.G);
    return r;
}

template <class T>
Pair<T> project_reversible(const Pair<T>& p) {
    return {{p.F.alpha, mf_project_reversible(p.F.m)}, {p.G.alpha, mf_project_reversible(p.G.m)}};
}

template <class T>
double pair_parity_drift(const Pair<T>& p) {
    return mf_parity_drift(p.F.m) + mf_parity_drift(p.G.m);
}

template <class T>
T pair_norm(const Pair<T>& p) {
    return mf_norm(p.F.m) + mf_norm(p.G.m);
}

template <class T>
Pair<T> pair_sub(const Pair<T>& a, const Pair<T>& b) {
    return {{a.F.alpha, mf_sub(a.F.m, b.F.m)}, {a.G.alpha, mf_sub(a.G.m, b.G.m)}};
}

namespace {

template <class T>
void push_series(std::vector<T>& out, const Series<T>& f, int start) {
    T w(1), r2 = T(f.rho()) * T(f.rho()), r(f.rho());
    if (start == 1) w = r;
    for (int n = start; n <= f.degree(); n += 2, w *= r2) out.push_back(f[n] * w);
}

template <class T>
void pull_series(Series<T>& f, const std::vector<T>& x, size_t& k, int start) {
    T w(1), r2 = T(f.rho()) * T(f.rho()), r(f.rho());
    if (start == 1) w = r;
    for (int n = start; n <= f.degree(); n += 2, w *= r2) f[n] = x[k++] / w;
}

}  // namespace

template <class T>
std::vector<T> to_vec(const Pair<T>& p) {
    std::vector<T> out;
    out.reserve(chart_of(p).size());
    for (const MatrixFn<T>* m : {&p.F.m, &p.G.m}) {
        push_series(out, m->t, 0);
        push_series(out, m->u, 0);
        push_series(out, m->v, 0);
        push_series(out, m->s, 1);
    }
    return out;
}

template <class T>
Pair<T> from_vec(const std::vector<T>& x, const Chart& ch) {
    if (int(x.size()) != ch.size()) throw std::invalid_argument("coefficient vector has wrong length");
    Pair<T> p{{T(1), MatrixFn<T>::constant(ch.N, ch.rho_f, T(0), T(0), T(0), T(0))},
              {golden<T>(), MatrixFn<T>::constant(ch.N, ch.rho_g, T(0), T(0), T(0), T(0))}};
    size_t k = 0;
    for (MatrixFn<T>* m : {&p.F.m, &p.G.m}) {
        pull_series(m->t, x, k, 0);
        pull_series(m->u, x, k, 0);
        pull_series(m->v, x, k, 0);
        pull_series(m->s, x, k, 1);
    }
    return p;
}

template <class T>
std::vector<T> op_vec(const std::vector<T>& x, const Chart& ch, Operator op, double ratio) {
    Pair<T> p = from_vec(x, ch);
    RGResult<T> r = op == Operator::full ? rg_full(p, ratio) : rg_three_palindromic(p, ratio);
    return to_vec(r.pair);
}

namespace {

template <class T> const char* precision_name();
template <> const char* precision_name<double>() { return "double"; }
template <> const char* precision_name<quad>() { return "quad"; }

template <class T>
std::vector<double> column_impl(const std::vector<T>& x, const Chart& ch, Operator op, JacMethod method, int j,
                                double ratio) {
    std::vector<double> col(x.size());
    if (method == JacMethod::dual) {
        std::vector<Dual<T>> xd(x.size());
        for (size_t i = 0; i < x.size(); ++i) xd[i] = Dual<T>(x[i], T(int(i) == j ? 1 : 0));
        std::vector<Dual<T>> y = op_vec(xd, ch, op, ratio);
        for (size_t i = 0; i < y.size(); ++i) col[i] = num::to_double(y[i].d);
    } else {
        T h = T(1e-6) * std::max(T(1), T(num::abs(x[j])));
        std::vector<T> xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        std::vector<T> yp = op_vec(xp, ch, op, ratio), ym = op_vec(xm, ch, op, ratio);
        for (size_t i = 0; i < yp.size(); ++i) col[i] = num::to_double((yp[i] - ym[i]) / (T(2) * h));
    }
    return col;
}

}  // namespace

template <class T>
std::vector<double> jacobian_column(const Pair<T>& p, Operator op, JacMethod method, int j, double ratio) {
    return column_impl(to_vec(p), chart_of(p), op, method, j, ratio);
}

template <class T>
Jacobian build_jacobian(const Pair<T>& p, Operator op, JacMethod method, double ratio) {
    Jacobian J;
    J.chart = chart_of(p);
    J.n = J.chart.size();
    J.op = op;
    J.method = method;
    J.precision = std::string(method == JacMethod::dual ? "dual<" : "central-fd<") + precision_name<T>() + ">";
    J.a.assign(size_t(J.n) * J.n, 0.0);
    std::vector<T> x = to_vec(p);
    for (int j = 0; j < J.n; ++j) {
        std::vector<double> col = column_impl(x, J.chart, op, method, j, ratio);
        for (int i = 0; i < J.n; ++i) J.a[size_t(i) * J.n + j] = col[i];
    }
    return J;
}

struct ResolventSolver::Impl {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
    int n;
};

ResolventSolver::ResolventSolver(const Jacobian& J) : impl_(new Impl) {
    Eigen::MatrixXd m(J.n, J.n);
    for (int i = 0; i < J.n; ++i)
        for (int j = 0; j < J.n; ++j) m(i, j) = (i == j ? 1.0 : 0.0) - J(i, j);
    impl_->lu.compute(m);
    impl_->n = J.n;
    double piv = impl_->lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (!(piv > 1e-300)) {
        delete impl_;
        throw NumericError("I - J is singular");
    }
}
ResolventSolver::~ResolventSolver() { delete impl_; }
int ResolventSolver::size() const { return impl_->n; }

std::vector<double> ResolventSolver::solve(const std::vector<double>& rhs) const {
    Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(rhs.data(), rhs.size());
    Eigen::VectorXd x = impl_->lu.solve(b);
    return {x.data(), x.data() + x.size()};
}

namespace {

template <class T>
std::vector<T> apply_K(const ResolventSolver& K, const std::vector<T>& p) {
    std::vector<double> d(p.size());
    for (size_t i = 0; i < p.size(); ++i) d[i] = num::to_double(p[i]);
    std::vector<double> y = K.solve(d);
    return {y.begin(), y.end()};
}

template <class T>
std::vector<Dual<T>> apply_K(const ResolventSolver& K, const std::vector<Dual<T>>& p) {
    std::vector<double> v(p.size()), dv(p.size());
    for (size_t i = 0; i < p.size(); ++i) {
        v[i] = num::to_double(p[i].v);
        dv[i] = num::to_double(p[i].d);
    }
    std::vector<double> y = K.solve(v), dy = K.solve(dv);
    std::vector<Dual<T>> out(p.size());
    for (size_t i = 0; i < p.size(); ++i) out[i] = Dual<T>(T(y[i]), T(dy[i]));
    return out;
}

template <class T>
double l1(const std::vector<T>& x) {
    T acc(0);
    for (const T& v : x) acc += num::abs(v);
    return num::to_double(acc);
}

}  // namespace

template <class T>
std::vector<T> quasi_newton_map(const Pair<T>& pbar, const ResolventSolver& K, const std::vector<T>& p, double ratio) {
    Chart ch = chart_of(pbar);
    std::vector<T> xb = to_vec(pbar);
    std::vector<T> kp = apply_K(K, p);
    std::vector<T> arg(xb.size());
    for (size_t i = 0; i < xb.size(); ++i) arg[i] = xb[i] + kp[i];
    std::vector<T> fx = op_vec(arg, ch, Operator::full, ratio);
    std::vector<T> out(xb.size());
    for (size_t i = 0; i < xb.size(); ++i) out[i] = fx[i] - xb[i] + p[i] - kp[i];
    return out;
}

ContractionEstimate contraction_estimate(const Pair<quad>& pbar, const ResolventSolver& K, double delta, int samples,
                                         unsigned seed, double ratio) {
    using D = Dual<quad>;
    ContractionEstimate est;
    est.delta = delta;
    const size_t n = size_t(K.size());
    est.epsilon = l1(quasi_newton_map(pbar, K, std::vector<quad>(n, quad(0)), ratio));
    Pair<D> pb = pair_convert<D>(pbar);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int s = 0; s < samples; ++s) {
        std::vector<double> p(n), h(n);
        for (size_t i = 0; i < n; ++i) {
            p[i] = g(rng);
            h[i] = g(rng);
        }
        double np = l1(p), nh = l1(h);
        double scale = s == 0 ? 0.0 : delta * u(rng) / np;
        std::vector<D> pd(n);
        for (size_t i = 0; i < n; ++i) pd[i] = D(quad(p[i] * scale), quad(h[i] / nh));
        std::vector<D> out = quasi_newton_map(pb, K, pd, ratio);
        std::vector<quad> d(n);
        for (size_t i = 0; i < n; ++i) d[i] = out[i].d;
        est.K = std::max(est.K, l1(d));
    }
    return est;
}

namespace {

SolveResult solve_impl(std::vector<quad> x, const Chart& ch, const SolveOptions& opt) {
    SolveResult res;
    std::unique_ptr<ResolventSolver> K;
    Operator k_op = Operator::full;
    double last = 1e300;
    int stall = 0;
    for (int it = 0; it < opt.max_iter; ++it) {
        // far from the fixed point det - 1 can be too large for the normalization;
        // the unnormalized operator has the same fixed point on unit-determinant pairs
        Operator op = Operator::full;
        std::vector<quad> fx;
        try {
            fx = op_vec(x, ch, Operator::full, opt.ratio);
        } catch (const DomainError&) {
            op = Operator::three;
            fx = op_vec(x, ch, Operator::three, opt.ratio);
        }
        std::vector<double> r(x.size());
        quad acc = 0;
        for (size_t i = 0; i < x.size(); ++i) {
            quad d = fx[i] - x[i];
            acc += fabsq(d);
            r[i] = double(d);
        }
        double res_now = double(acc);
        res.history.push_back(res_now);
        if (opt.verbose)
            std::fprintf(stderr, "newton %d residual %.3e%s\n", it, res_now, op == Operator::three ? " (unnormalized)" : "");
        if (!std::isfinite(res_now)) throw NumericError("fixed point iteration produced non-finite values");
        if (op == Operator::full && res_now < opt.tol) break;
        if (op == Operator::full && res_now > 0.8 * last) {
            if (++stall >= 4) break;
        } else {
            stall = 0;
        }
        // fresh Jacobian while in the double-precision regime or when progress is slow
        if (!K || k_op != op || (res_now > 1e-9 && res_now > 1e-3 * last)) {
            std::vector<double> xd(x.size());
            for (size_t i = 0; i < x.size(); ++i) xd[i] = double(x[i]);
            K = std::make_unique<ResolventSolver>(build_jacobian(from_vec(xd, ch), op, JacMethod::dual, opt.ratio));
            k_op = op;
            ++res.jacobians;
        }
        last = op == Operator::full ? res_now : 1e300;
        std::vector<double> dx = K->solve(r);
        for (size_t i = 0; i < x.size(); ++i) x[i] += quad(dx[i]);
        res.iterations = it + 1;
    }
    res.pair = from_vec(x, ch);
    res.residual = res.history.back();
    res.sigma = rg_three_palindromic(res.pair, opt.ratio).sigma;
    return res;
}

}  // namespace

SolveResult solve_fixed_point(const Pair<double>& seed, const SolveOptions& opt) {
    return solve_fixed_point(pair_convert<quad>(seed), opt);
}

SolveResult solve_fixed_point(const Pair<quad>& seed, const SolveOptions& opt) {
    Chart ch = chart_of(seed);
    if (auto v = three_domain_violation(ch.rho_f, ch.rho_g)) throw DomainError(*v);
    return solve_impl(to_vec(seed), ch, opt);
}

std::vector<Eigenvalue> jacobian_spectrum(const Jacobian& J) {
    using M = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    M m(J.n, J.n);
    for (int i = 0; i < J.n; ++i)
        for (int j = 0; j < J.n; ++j) {
            if (!std::isfinite(J(i, j))) throw NumericError("Jacobian has non-finite entries");
            m(i, j) = J(i, j);
        }
    Eigen::EigenSolver<M> es(m, false);
    if (es.info() != Eigen::Success) throw NumericError("eigenvalue iteration did not converge");
    std::vector<Eigenvalue> out;
    for (int i = 0; i < J.n; ++i) {
        auto z = es.eigenvalues()[i];
        out.push_back({{double(z.real()), double(z.imag())}});
    }
    std::stable_sort(out.begin(), out.end(), [](const Eigenvalue& a, const Eigenvalue& b) {
        double ma = std::abs(a.z), mb = std::abs(b.z);
        if (ma != mb) return ma > mb;
        return a.z.real() > b.z.real();
    });
    return out;
}

std::vector<FamilyCheck> classify_trivial_eigenvalues(std::vector<Eigenvalue>& spectrum, double sigma, int n_max,
                                                      double rel_tol) {
    std::vector<FamilyCheck> checks;
    const double a3 = std::pow(kAlpha, 3), e2 = std::exp(2 * sigma);
    for (int n = 0; n <= n_max; ++n) {
        double p = std::pow(a3, n);
        checks.push_back({"kappa", n, p});
        checks.push_back({"kappa+", n, -e2 * p});
        checks.push_back({"kappa-", n, -p / e2});
        checks.push_back({"eta", n, -p});
    }
    for (auto& c : checks) {
        double best = 1e300;
        for (auto& ev : spectrum) {
            double d = std::abs(ev.z - std::complex<double>(c.predicted, 0)) / std::abs(c.predicted);
            if (d < best) {
                best = d;
                c.closest = ev.z.real();
            }
            if (d < rel_tol) {
                c.present = true;
                std::string t = c.family + "_" + std::to_string(c.n);
                ev.tag = ev.tag == "nontrivial" ? t : ev.tag + ";" + t;
            }
        }
    }
    return checks;
}

template <class T>
MatrixFn<T> commutator(const Pair<T>& p) {
    const T al = golden<T>(), h = al / T(2), half = T(1) / T(2);
    double r = std::min(p.rho_f() - num::to_double(h), p.rho_g() - 0.5);
    if (!(r > 0)) throw DomainError("commutator: radii too small");
    const MatrixFn<T>&A = p.G.m, &B = p.F.m;
    MatrixFn<T> c = mf_mul(mf_affine(B, T(1), h, r), mf_affine(A, T(1), -half, r));
    c = mf_mul(c, mf_adj(mf_affine(B, T(1), -h, r)));
    c = mf_mul(c, mf_adj(mf_affine(A, T(1), half, r)));
    return sk_normalize(SkewMap<T>{T(0), c}).m;
}

namespace {

template <class T>
Mat2<T> inv2(const Mat2<T>& m) {
    T d = m.det();
    return {m.d / d, -m.b / d, -m.c / d, m.a / d};
}

Mat2<quad> a1_at(const Pair<quad>& p, quad sigma, quad z) {
    const quad al = golden<quad>(), a3 = al * al * al;
    Mat2<quad> a = mf_eval(p.G.m, quad(0.5) + a3 * z);
    Mat2<quad> L{expq(sigma), 0, 0, -expq(-sigma)};
    return a * L;
}

std::pair<std::complex<double>, std::complex<double>> eig2(const Mat2<quad>& m) {
    std::complex<double> tr = double(m.trace()), det = double(m.det());
    std::complex<double> disc = std::sqrt(tr * tr - 4.0 * det);
    return {(tr + disc) / 2.0, (tr - disc) / 2.0};
}

}  // namespace

double commutator_recursion_residual(const Pair<quad>& p, quad sigma, int samples, double zmax) {
    MatrixFn<quad> c = commutator(p);
    const quad al = golden<quad>(), a3 = al * al * al;
    double worst = 0;
    for (int k = 0; k < samples; ++k) {
        quad z = quad(zmax) * (quad(2 * k) / quad(samples - 1) - 1);
        Mat2<quad> lhs = mf_eval(c, z);
        Mat2<quad> A1 = a1_at(p, sigma, z);
        Mat2<quad> rhs = inv2(A1) * inv2(mf_eval(c, a3 * z)) * A1;
        for (quad d : {lhs.a - rhs.a, lhs.b - rhs.b, lhs.c - rhs.c, lhs.d - rhs.d}) worst = std::max(worst, double(fabsq(d)));
    }
    return worst;
}

AiCiReport check_aici(const Pair<quad>& p, quad sigma) {
    AiCiReport r;
    Mat2<quad> A1 = a1_at(p, sigma, 0);
    r.detA1 = double(A1.det());
    std::tie(r.theta1, r.theta2) = eig2(A1);
    double margin = 1e300;
    for (auto th : {r.theta1, r.theta2}) {
        double arg = std::abs(std::arg(th * th));
        margin = std::min({margin, arg, std::abs(M_PI - arg)});
    }
    r.arg_margin = margin;
    MatrixFn<quad> c = commutator(p);
    Mat2<quad> c0 = mf_eval(c, quad(0));
    std::tie(r.c1, r.c2) = eig2(c0);
    r.minus_one_margin = std::min(std::abs(r.c1 + 1.0), std::abs(r.c2 + 1.0));
    r.c_identity_dist = std::max({double(fabsq(c0.a - 1)), double(fabsq(c0.b)), double(fabsq(c0.c)), double(fabsq(c0.d - 1))});
    return r;
}

#define SKEWRG_INST(T)                                                                             \
    template RGResult<T> rg_single<T>(const Pair<T>&, double);                                     \
    template RGResult<T> rg_three_palindromic<T>(const Pair<T>&, double);                          \
    template RGResult<T> rg_full<T>(const Pair<T>&, double);                                       \
    template Pair<T> project_reversible<T>(const Pair<T>&);                                        \
    template double pair_parity_drift<T>(const Pair<T>&);                                          \
    template T pair_norm<T>(const Pair<T>&);                                                       \
    template Pair<T> pair_sub<T>(const Pair<T>&, const Pair<T>&);                                  \
    template std::vector<T> to_vec<T>(const Pair<T>&);                                             \
    template Pair<T> from_vec<T>(const std::vector<T>&, const Chart&);                             \
    template std::vector<T> op_vec<T>(const std::vector<T>&, const Chart&, Operator, double);      \
    template MatrixFn<T> commutator<T>(const Pair<T>&);

SKEWRG_INST(double)
SKEWRG_INST(quad)
SKEWRG_INST(Dual<double>)
SKEWRG_INST(Dual<quad>)

template RGResult<Ball> rg_full<Ball>(const Pair<Ball>&, double);
template Ball pair_norm<Ball>(const Pair<Ball>&);
template Pair<Ball> pair_sub<Ball>(const Pair<Ball>&, const Pair<Ball>&);

template Jacobian build_jacobian<double>(const Pair<double>&, Operator, JacMethod, double);
template Jacobian build_jacobian<quad>(const Pair<quad>&, Operator, JacMethod, double);
template std::vector<double> jacobian_column<double>(const Pair<double>&, Operator, JacMethod, int, double);
template std::vector<double> jacobian_column<quad>(const Pair<quad>&, Operator, JacMethod, int, double);
template std::vector<double> quasi_newton_map<double>(const Pair<double>&, const ResolventSolver&, const std::vector<double>&, double);
template std::vector<quad> quasi_newton_map<quad>(const Pair<quad>&, const ResolventSolver&, const std::vector<quad>&, double);

}  // namespace skewrg
