// SPDX-License-Identifier: Apache-2.0
#include "skewrg/am.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <random>

namespace skewrg {

namespace {

// Taylor coefficients of 2 lambda cos(2 pi (x + phi)) on radius rho
template <class T>
Series<T> cosine_series(T lambda, T phi, int N, double rho) {
    const T w = T(2) * pi<T>();
    const T c = num::cos(w * phi), s = num::sin(w * phi);
    Series<T> f(N, rho);
    T term(1);  // w^n / n!
    for (int n = 0; n <= N; ++n) {
        // d^n/dx^n cos(w x + w phi) at 0 = w^n cos(w phi + n pi/2)
        T val;
        switch (n % 4) {
            case 0: val = c; break;
            case 1: val = -s; break;
            case 2: val = -c; break;
            default: val = s; break;
        }
        f[n] = T(2) * lambda * val * term;
        term = term * w / T(n + 1);
    }
    // remainder: sum_{n>N} 2 lambda (w rho)^n / n!
    double wr = 2 * M_PI * rho, t = 2 * num::to_double(num::abs(lambda)), tail = 0;
    for (int n = 1; n <= N; ++n) t *= wr / n;
    for (int n = N + 1; n < N + 400; ++n) {
        t *= wr / n;
        tail += t;
        if (t < 1e-300) break;
    }
    f.set_tail(tail);
    return f;
}

}  // namespace

template <class T>
Pair<T> am_pair(T lambda, T E, T xi, T alpha, int N, double rho_f, double rho_g) {
    // translated potential V0(x) = V(x - alpha/2)
    Series<T> V = cosine_series(lambda, xi - alpha / T(2), N, rho_g);
    double nv = s_norm_bound(V);
    if (V.tail() > 1e-14 * std::max(1.0, nv))
        throw DomainError("truncation degree " + std::to_string(N) + " too small for the cosine on radius " +
                          std::to_string(rho_g));
    Series<T> t = s_scale(s_sub(Series<T>::constant(N, rho_g, E), V), T(1) / T(2));
    Series<T> u = t, v = t;
    u[0] += T(1);
    v[0] -= T(1);
    Pair<T> p;
    p.F = {T(1), MatrixFn<T>::identity(N, rho_f)};
    p.G = {alpha, {t, u, v, Series<T>(N, rho_g)}};
    return p;
}

Pair<double> am_pair(const AMParams& p, int N, double rho_f, double rho_g) {
    return am_pair<double>(p.lambda, p.E, p.xi, p.alpha, N, rho_f, rho_g);
}

template <class T>
Mat2<T> transfer_product(T lambda, T E, T xi, T alpha, int q, T x) {
    if (q < 1) throw std::invalid_argument("transfer product needs q >= 1");
    const T w = T(2) * pi<T>();
    Mat2<T> P{T(1), T(0), T(0), T(1)};
    for (int j = 0; j < q; ++j) {
        T xj = x + T(j) * alpha + xi;
        xj = xj - num::floor(xj);
        T a = E - T(2) * lambda * num::cos(w * xj);
        // [[a, -1], [1, 0]] * P
        P = Mat2<T>{a * P.a - P.c, a * P.b - P.d, P.a, P.b};
    }
    return P;
}

Mat2<double> transfer_product(const AMParams& p, int q, double x) {
    return transfer_product<double>(p.lambda, p.E, p.xi, p.alpha, q, x);
}

template Mat2<double> transfer_product<double>(double, double, double, double, int, double);
template Mat2<quad> transfer_product<quad>(quad, quad, quad, quad, int, quad);
template Pair<double> am_pair<double>(double, double, double, double, int, double, double);
template Pair<quad> am_pair<quad>(quad, quad, quad, quad, int, double, double);

namespace {

// trace at x = 1/(4q) and its E-derivative, from the sampled potential
std::pair<double, double> chambers_with_slope(const std::vector<double>& V, double E) {
    // P = [[a, b], [c, d]] and its E-derivative
    double a = 1, b = 0, c = 0, d = 1, da = 0, db = 0, dc = 0, dd = 0;
    for (double v : V) {
        double e = E - v;
        double na = e * a - c, nb = e * b - d;
        double nda = a + e * da - dc, ndb = b + e * db - dd;
        c = a;
        d = b;
        dc = da;
        dd = db;
        a = na;
        b = nb;
        da = nda;
        db = ndb;
    }
    return {a + d, da + dd};
}

std::vector<double> chambers_potential(int p, int q, double lambda) {
    std::vector<double> V(q);
    for (int j = 0; j < q; ++j) {
        // x_j = 1/(4q) + j p/q, reduced exactly in integer arithmetic
        long long num = 1 + 4LL * ((long long)j * p % q);
        V[j] = 2 * lambda * std::cos(2 * M_PI * double(num) / (4.0 * q));
    }
    return V;
}

}  // namespace

double chambers_value(int p, int q, double lambda, double E) {
    return double(transfer_product<quad>(lambda, E, 0, quad(p) / q, q, quad(1) / (4 * q)).trace());
}

ChambersResult chambers_trace(int p, int q, double lambda, double E, int samples, unsigned seed) {
    if (std::gcd(p, q) != 1) throw std::invalid_argument("chambers: p and q must be coprime");
    ChambersResult r;
    const quad alpha = quad(p) / q;
    quad e = transfer_product<quad>(lambda, E, 0, alpha, q, quad(1) / (4 * q)).trace();
    r.value = double(e);
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    quad lq = powq(quad(lambda), q);
    for (int k = 0; k < samples; ++k) {
        quad x = U(rng);
        quad tr = transfer_product<quad>(lambda, E, 0, alpha, q, x).trace();
        quad pred = e - 2 * lq * cosq(2 * M_PIq * q * x);
        r.residual = std::max(r.residual, double(fabsq(tr - pred)));
    }
    return r;
}

namespace {

// eigenvalues of the q-site Hamiltonian (H u)_j = u_{j+1} + u_{j-1} + V(x + j p/q) u_j
// closed periodically (sign +1) or antiperiodically (sign -1)
std::vector<double> bloch_eigenvalues(int p, int q, double lambda, double x, int sign) {
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(q, q);
    for (int j = 0; j < q; ++j) {
        double xj = x + double((long long)j * p % q) / q;
        H(j, j) = 2 * lambda * std::cos(2 * M_PI * xj);
    }
    if (q == 1) {
        H(0, 0) += 2 * sign;
    } else {
        for (int j = 0; j + 1 < q; ++j) H(j, j + 1) = H(j + 1, j) = 1;
        H(0, q - 1) += sign;
        H(q - 1, 0) += sign;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericError("bands: eigenvalue solver failed");
    std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + q);
    return ev;
}

}  // namespace

std::vector<Band> spectrum_bands(int p, int q, double lambda, double tol) {
    if (q < 1 || p < 0 || std::gcd(p, q) != 1) throw std::invalid_argument("bands: need q >= 1 and gcd(p,q) = 1");
    if (lambda < 0) throw std::invalid_argument("bands: lambda must be nonnegative");
    const double T = 2 + 2 * std::pow(lambda, q);
    const std::vector<double> V = chambers_potential(p, q, lambda);
    auto f = [&](double E) { return chambers_with_slope(V, E).first; };

    // at x = 0 the trace is E(E) - 2 lambda^q, at x = 1/(2q) it is E(E) + 2 lambda^q,
    // so E(E) = T at periodic and E(E) = -T at antiperiodic eigenvalues
    struct Edge {
        double e;
        double level;
    };
    std::vector<Edge> edges;
    for (double e : bloch_eigenvalues(p, q, lambda, 0.0, 1)) edges.push_back({e, T});
    for (double e : bloch_eigenvalues(p, q, lambda, 0.5 / q, -1)) edges.push_back({e, -T});
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) { return a.e < b.e; });

    // polish each edge on the trace polynomial: bracket, then bisect
    for (Edge& ed : edges) {
        double w = tol * 1e-2, a = ed.e - w, b = ed.e + w;
        double fa = f(a) - ed.level, fb = f(b) - ed.level;
        if ((fa < 0) == (fb < 0)) continue;  // double root at a touching point
        for (int it = 0; it < 200 && b - a > 4e-16 * std::max(1.0, std::fabs(a)); ++it) {
            double m = 0.5 * (a + b), fm = f(m) - ed.level;
            if (fm == 0) {
                a = b = m;
                break;
            }
            if ((fm < 0) == (fa < 0)) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        ed.e = 0.5 * (a + b);
    }

    std::vector<Band> out;
    for (int i = 0; i < q; ++i) {
        double lo = edges[2 * i].e, hi = edges[2 * i + 1].e;
        if (hi < lo) hi = lo;
        if (!out.empty() && lo < out.back().hi) lo = out.back().hi;
        // consistency of resolvable bands; thinner ones are below double resolution of the trace
        if (hi - lo > 1e-8 && std::fabs(f(0.5 * (lo + hi))) > T * (1 + 1e-6))
            throw NumericError("bands: inconsistent edges for p/q = " + std::to_string(p) + "/" + std::to_string(q));
        out.push_back({q, p, i + 1, lo, hi});
    }
    return out;
}

double rotation_number(const AMParams& prm, long N, double x0) {
    if (N < 1000) throw std::invalid_argument("rotation number needs N >= 1000");
    const double w = 2 * M_PI;
    double um = 0.0, u = 1.0;
    long changes = 0;
    int last = 1;
    for (long n = 0; n < N; ++n) {
        double x = x0 + prm.xi + double(n) * prm.alpha;
        x -= std::floor(x);
        double un = (prm.E - 2 * prm.lambda * std::cos(w * x)) * u - um;
        um = u;
        u = un;
        if (std::fabs(u) < 1e-30) {
            ++changes;
            last = 0;
        } else {
            int s = u > 0 ? 1 : -1;
            if (last != 0 && s != last) ++changes;
            last = s;
        }
        if (n % 1000 == 999 || std::fabs(u) > 1e150) {
            double sc = std::hypot(u, um);
            if (!(sc > 0) || !std::isfinite(sc)) throw NumericError("rotation number: solution degenerated");
            u /= sc;
            um /= sc;
        }
    }
    return double(changes) / (2.0 * double(N));
}

GapLabel label_from_rotation(double rot, double alpha, int kmax) {
    GapLabel g;
    g.rot = rot;
    g.defect = 1e300;
    for (int k = -kmax; k <= kmax; ++k) {
        double y = 2 * rot - k * alpha;
        double d = std::fabs(y - std::round(y));
        if (d < g.defect - 1e-15 || (std::fabs(d - g.defect) <= 1e-15 && std::abs(k) < std::abs(g.k))) {
            g.defect = d;
            g.k = k;
        }
    }
    return g;
}

GapLabel gap_label(double alpha, double E, double lambda, int kmax, long N) {
    AMParams prm;
    prm.alpha = alpha;
    prm.lambda = lambda;
    prm.E = E;
    GapLabel g = label_from_rotation(rotation_number(prm, N), alpha, kmax);
    if (g.defect > 1e-4) throw NumericError("no admissible gap label (energy not in a gap, or N too small)");
    return g;
}

namespace {

long long inverse_mod(long long a, long long m) {
    long long g = m, x = 0, x1 = 1, a1 = ((a % m) + m) % m;
    while (a1) {
        long long qt = g / a1;
        std::tie(g, a1) = std::make_pair(a1, g - qt * a1);
        std::tie(x, x1) = std::make_pair(x1, x - qt * x1);
    }
    return ((x % m) + m) % m;
}

}  // namespace

int rational_label(int p, int q, int below) {
    if (q == 1) return 0;
    long long k = (-(long long)below * inverse_mod(p, q)) % q;
    if (k < 0) k += q;
    if (2 * k > q) k -= q;
    return int(k);
}

std::vector<Gap> rational_gaps(const std::vector<Band>& bands) {
    std::vector<Gap> out;
    for (size_t i = 0; i + 1 < bands.size(); ++i) {
        const Band &a = bands[i], &b = bands[i + 1];
        if (!(b.lo > a.hi)) continue;  // touching bands
        Gap g;
        g.q = a.q;
        g.p = a.p;
        g.below = a.index;
        g.k = rational_label(a.p, a.q, a.index);
        g.lo = a.hi;
        g.hi = b.lo;
        g.rot = 0.5 * (1.0 - double(a.index) / a.q);
        out.push_back(g);
    }
    return out;
}

ButterflyData butterfly_scan(int qmax, double lambda) {
    if (qmax < 1 || qmax > 1000) throw std::invalid_argument("butterfly: qmax must be in [1, 1000]");
    ButterflyData d;
    d.qmax = qmax;
    d.lambda = lambda;
    for (int q = 1; q <= qmax; ++q)
        for (int p = 0; p <= q; ++p) {
            if (std::gcd(p, q) != 1) continue;
            std::vector<Band> b = spectrum_bands(p, q, lambda);
            std::vector<Gap> g = rational_gaps(b);
            d.bands.insert(d.bands.end(), b.begin(), b.end());
            d.gaps.insert(d.gaps.end(), g.begin(), g.end());
        }
    return d;
}

void write_bands_csv(std::ostream& os, const std::vector<Band>& bands) {
    os << "q,p,band_index,E_lo,E_hi\n";
    for (const Band& b : bands)
        os << b.q << "," << b.p << "," << b.index << "," << format_scalar(b.lo) << "," << format_scalar(b.hi) << "\n";
}

void write_gaps_csv(std::ostream& os, const std::vector<Gap>& gaps) {
    os << "q,p,gap_index_k,E_lo,E_hi,rot\n";
    for (const Gap& g : gaps)
        os << g.q << "," << g.p << "," << g.k << "," << format_scalar(g.lo) << "," << format_scalar(g.hi) << ","
           << format_scalar(g.rot) << "\n";
}

const char* gap_color(int k) {
    static const char* palette[16] = {"#e6194b", "#3cb44b", "#ffe119", "#4363d8", "#f58231", "#911eb4",
                                      "#46f0f0", "#f032e6", "#bcf60c", "#fabebe", "#008080", "#e6beff",
                                      "#9a6324", "#fffac8", "#800000", "#aaffc3"};
    return palette[((k % 16) + 16) % 16];
}

void write_butterfly_svg(std::ostream& os, const ButterflyData& d, const SvgView& v) {
    auto num6 = [](double x) {
        char b[32];
        std::snprintf(b, sizeof b, "%.6g", x);
        return std::string(b);
    };
    const double W = v.width, H = v.height;
    auto X = [&](double a) { return (a - v.a0) / (v.a1 - v.a0) * W; };
    auto Y = [&](double e) { return (v.e1 - e) / (v.e1 - v.e0) * H; };
    const double col = std::max(1.0, W / (4.0 * std::max(1, d.qmax)));
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << v.width << "\" height=\"" << v.height
       << "\" viewBox=\"0 0 " << v.width << " " << v.height << "\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << v.width << "\" height=\"" << v.height << "\" fill=\"#ffffff\"/>\n";
    for (const Gap& g : d.gaps) {
        double a = double(g.p) / g.q;
        if (a < v.a0 || a > v.a1) continue;
        double lo = std::max(g.lo, v.e0), hi = std::min(g.hi, v.e1);
        if (!(hi > lo)) continue;
        os << "<rect x=\"" << num6(X(a) - col / 2) << "\" y=\"" << num6(Y(hi)) << "\" width=\"" << num6(col)
           << "\" height=\"" << num6(Y(lo) - Y(hi)) << "\" fill=\"" << gap_color(g.k) << "\"/>\n";
    }
    for (const Band& b : d.bands) {
        double a = double(b.p) / b.q;
        if (a < v.a0 || a > v.a1) continue;
        double lo = std::max(b.lo, v.e0), hi = std::min(b.hi, v.e1);
        if (hi < lo) continue;
        os << "<rect x=\"" << num6(X(a) - col / 2) << "\" y=\"" << num6(Y(hi)) << "\" width=\"" << num6(col)
           << "\" height=\"" << num6(std::max(Y(lo) - Y(hi), 0.5)) << "\" fill=\"#000000\"/>\n";
    }
    os << "</svg>\n";
}

long long fib(int m) {
    if (m < 0) throw std::invalid_argument("fib: negative index");
    long long a = 0, b = 1;
    for (int i = 0; i < m; ++i) {
        long long c = a + b;
        a = b;
        b = c;
    }
    return a;
}

namespace {
// depth of the generation-0 box; boxes then shrink by mu1^{1/3} per generation
constexpr double kZoomDepth = 7.45;
constexpr double kZoomWidth = 0.1;
}  // namespace

ZoomBox zoom_box(int n, double estar, double mu1) {
    const double a = (std::sqrt(5.0) - 1) / 2;
    ZoomBox b;
    b.generation = n;
    double depth = kZoomDepth * std::pow(mu1, -n / 3.0);
    double half = kZoomWidth * std::pow(a, 2 * n);
    b.a0 = a - half;
    b.a1 = a + half;
    b.e0 = estar - depth;
    b.e1 = estar + 0.05 * depth;
    return b;
}

ZoomReport zoom_analysis(int generations, double estar, double mu1, int q_index) {
    ZoomReport rep;
    rep.q = int(fib(q_index));
    rep.p = int(fib(q_index - 1));
    std::vector<Gap> gaps = rational_gaps(spectrum_bands(rep.p, rep.q, 1.0));
    auto expected = [](int n) { return int((n % 2 ? -1 : 1) * fib(n + 1)); };
    for (int n = 1; n <= generations; ++n) {
        ZoomGeneration g;
        g.box = zoom_box(n, estar, mu1);
        g.expected_k = expected(n);
        double best = -1;
        for (const Gap& gp : gaps) {
            double len = std::min(gp.hi, g.box.e1) - std::max(gp.lo, g.box.e0);
            if (len > best) {
                best = len;
                g.largest = gp;
            }
        }
        rep.gens.push_back(g);
    }
    auto depth = [&](int k) {
        for (const Gap& gp : gaps)
            if (gp.k == k) return estar - 0.5 * (gp.lo + gp.hi);
        return std::numeric_limits<double>::quiet_NaN();
    };
    double sum = 0;
    int cnt = 0;
    for (int n = 1; n <= generations; ++n) {
        double r = depth(expected(n)) / depth(expected(n + 3));
        rep.depth_ratios.push_back(r);
        if (std::isfinite(r)) {
            sum += r;
            ++cnt;
        }
    }
    rep.mean_ratio = cnt ? sum / cnt : std::numeric_limits<double>::quiet_NaN();
    return rep;
}

ButterflyData zoom_scan(const ZoomBox& box, int qmax, double lambda) {
    ButterflyData d;
    d.qmax = qmax;
    d.lambda = lambda;
    for (int q = 1; q <= qmax; ++q) {
        int p0 = int(std::ceil(box.a0 * q)), p1 = int(std::floor(box.a1 * q));
        for (int p = std::max(p0, 0); p <= std::min(p1, q); ++p) {
            if (std::gcd(p, q) != 1) continue;
            std::vector<Band> b = spectrum_bands(p, q, lambda);
            for (const Band& x : b)
                if (x.hi >= box.e0 && x.lo <= box.e1) d.bands.push_back(x);
            for (const Gap& g : rational_gaps(b))
                if (g.hi >= box.e0 && g.lo <= box.e1) d.gaps.push_back(g);
        }
    }
    return d;
}

// Above E* the renormalized traces run off to +infinity; below, the orbit
// leaves the fixed point on the branch where the trace turns negative.
Classification classify_energy(double E, const BootstrapOptions& opt) {
    const double a = (std::sqrt(5.0) - 1) / 2;
    Pair<double> P = am_pair<double>(1.0, E, reversible_phase(a), a, opt.N, opt.rho_f, opt.rho_g);
    for (int step = 1; step <= opt.max_steps; ++step) {
        try {
            P = rg_single(P).pair;
        } catch (const std::exception& e) {
            throw NumericError("bootstrap at E=" + format_scalar(E) + ": iterate left the domain at step " +
                               std::to_string(step) + " (" + e.what() + ")");
        }
        if (step % 3) continue;
        double tr = 2 * P.G.m.t[0];
        if (std::isnan(tr))
            throw NumericError("bootstrap at E=" + format_scalar(E) + ": trace undefined at step " + std::to_string(step));
        if (tr < opt.trace_low) return {-1, step};
        if (tr > opt.trace_high) return {1, step};
    }
    return {0, opt.max_steps};
}

BootstrapResult bootstrap_Estar(const BootstrapOptions& opt) {
    double lo = opt.lo, hi = opt.hi;
    if (classify_energy(lo, opt).sign != -1 || classify_energy(hi, opt).sign != 1)
        throw NumericError("bootstrap: bracket does not straddle the critical energy");
    BootstrapResult r;
    while (hi - lo > opt.tol) {
        double mid = 0.5 * (lo + hi);
        int s = classify_energy(mid, opt).sign;
        ++r.bisections;
        if (s > 0) {
            hi = mid;
        } else if (s < 0) {
            lo = mid;
        } else {
            lo = hi = mid;
        }
    }
    r.Estar = 0.5 * (lo + hi);
    const double a = (std::sqrt(5.0) - 1) / 2;
    Pair<double> P = am_pair<double>(1.0, r.Estar, reversible_phase(a), a, opt.N, opt.rho_f, opt.rho_g);
    for (int k = 0; k < opt.seed_steps; ++k) P = rg_single(P).pair;
    r.seed = project_reversible(P);
    return r;
}

}  // namespace skewrg
