// SPDX-License-Identifier: Apache-2.0
#include "skewrg/orbit.hpp"

#include <cmath>
#include <ostream>
#include <random>

namespace skewrg {

namespace {

quad potential(quad lambda, quad x) {
    x -= floorq(x);
    return 2 * lambda * cosq(2 * M_PIq * x);
}

}  // namespace

OrbitRecord eigenfunction_orbit(long n_max, quad E, double lambda) {
    if (n_max < 1 || n_max > 10000000) throw std::invalid_argument("orbit length must lie in [1, 1e7]");
    const quad alpha = golden<quad>();
    OrbitRecord rec;
    rec.alpha = double(alpha);
    rec.lambda = lambda;
    rec.E = E;
    rec.xi = 0;
    rec.x0 = double(alpha / 2);
    rec.u.resize(size_t(n_max) + 1);
    quad um = 1, u = 1, best = 1;
    rec.u[0] = 1;
    rec.min_u = rec.max_u = 1;
    const quad x0 = alpha / 2;
    for (long n = 0; n < n_max; ++n) {
        quad x = x0 + quad(n) * alpha;
        quad un = (E - potential(lambda, x)) * u - um;
        um = u;
        u = un;
        double d = double(u);
        if (!std::isfinite(d)) throw NumericError("orbit overflow at n=" + std::to_string(n + 1));
        rec.u[n + 1] = d;
        rec.min_u = std::min(rec.min_u, d);
        rec.max_u = std::max(rec.max_u, d);
        if (u > best) {
            best = u;
            rec.peaks.push_back({int(rec.peaks.size()) + 1, n + 1, d});
        }
    }
    return rec;
}

OrbitRecord eigenfunction_orbit(long n_max) { return eigenfunction_orbit(n_max, parse_scalar<quad>(kEstarDecimal)); }

double orbit_residual(const OrbitRecord& rec, int samples, unsigned seed) {
    const long N = long(rec.u.size()) - 1;
    if (N < 2) return 0;
    const quad alpha = golden<quad>();
    std::mt19937 rng(seed);
    std::uniform_int_distribution<long> pick(1, N - 1);
    double worst = 0;
    for (int k = 0; k < samples; ++k) {
        long n = pick(rng);
        quad x = alpha / 2 + quad(n) * alpha;
        quad r = quad(rec.u[n + 1]) - (rec.E - potential(rec.lambda, x)) * quad(rec.u[n]) + quad(rec.u[n - 1]);
        double scale = std::max({1.0, std::fabs(rec.u[n + 1]), std::fabs(rec.u[n]), std::fabs(rec.u[n - 1])});
        worst = std::max(worst, double(fabsq(r)) / scale);
    }
    return worst;
}

long peak_position(int m) { return (fib(3 * m + 1) - 1) / 2; }

PeakGrowth peak_growth(const OrbitRecord& rec, double sigma_star, int m_lo, int m_hi) {
    if (rec.peaks.size() < 5) throw NumericError("peak growth needs at least 5 record peaks");
    if (m_hi > int(rec.peaks.size())) throw NumericError("peak growth: only " + std::to_string(rec.peaks.size()) + " peaks available");
    PeakGrowth g;
    g.m_lo = m_lo;
    g.m_hi = m_hi;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (int m = m_lo; m <= m_hi; ++m) {
        double y = std::log(rec.peaks[m - 1].height);
        sx += m;
        sy += y;
        sxx += double(m) * m;
        sxy += m * y;
        ++n;
    }
    g.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    g.ratio = g.slope / (2 * sigma_star);
    return g;
}

std::vector<FibReturn> fibonacci_vectors(const OrbitRecord& rec, int m_lo, int m_hi) {
    std::vector<FibReturn> out;
    for (int m = m_lo; m <= m_hi; ++m) {
        long q = long(fib(m));
        if (q < 1 || q >= long(rec.u.size())) throw NumericError("orbit too short for Fibonacci index " + std::to_string(m));
        double a = rec.u[q], b = rec.u[q - 1];
        double y0 = (a + b) / std::sqrt(2.0), y1 = (a - b) / std::sqrt(2.0);
        out.push_back({m, q, std::hypot(y0, y1), std::atan2(std::fabs(y1), std::fabs(y0))});
    }
    return out;
}

RecurrenceReport fibonacci_return(quad E, int generations, int N, double rho_f, double rho_g) {
    if (generations < 1) throw std::invalid_argument("recurrence needs at least one generation");
    const quad alpha = golden<quad>();
    RecurrenceReport rep;
    rep.E = double(E);
    Pair<quad> P = am_pair<quad>(1, E, alpha / 2, alpha, N, rho_f, rho_g);
    quad sigma = 0;
    std::vector<quad> sig;
    for (int n = 1; n <= generations; ++n) {
        try {
            RGResult<quad> r = rg_single(P);
            P = r.pair;
            sig.push_back(r.sigma);
            sigma += r.sigma;
        } catch (const std::exception& e) {
            rep.diverged = true;
            rep.diverged_at = n;
            rep.reason = e.what();
            break;
        }
        Mat2<quad> A = mf_eval(P.G.m, alpha / 2);
        quad y0 = A.a, y1 = expq(-2 * sigma) * A.c;
        RecurrenceStep st;
        st.n = n;
        st.sigma_step = double(sig.back());
        st.sigma_total = double(sigma);
        st.y_norm = double(sqrtq(y0 * y0 + y1 * y1));
        st.a_norm = double(sqrtq(A.a * A.a + A.b * A.b + A.c * A.c + A.d * A.d));
        rep.steps.push_back(st);
        if (!std::isfinite(st.y_norm) || !std::isfinite(st.a_norm) || st.a_norm > 1e8) {
            rep.diverged = true;
            rep.diverged_at = n;
            rep.reason = "matrix norm " + format_scalar(st.a_norm) + " at generation " + std::to_string(n);
            break;
        }
        rep.sup_y = std::max(rep.sup_y, st.y_norm);
    }
    if (!rep.diverged && generations >= 12) {
        // steps 10..generations
        quad s = 0;
        for (int n = 10; n <= generations; ++n) s += sig[n - 1];
        rep.mean_increment = double(s / (generations - 9));
        // sigma_3 of the last complete triple
        int k = generations - generations % 3;
        rep.sigma3_positive = sig[k - 1] + sig[k - 2] + sig[k - 3] > 0;
    }
    return rep;
}

void write_orbit_csv(std::ostream& os, const OrbitRecord& rec, long stride) {
    if (stride < 1) stride = 1;
    os << "n,u_n\n";
    for (size_t n = 0; n < rec.u.size(); ++n) {
        if (n > 100000 && n % size_t(stride)) continue;
        os << n << "," << format_scalar(rec.u[n]) << "\n";
    }
}

void write_peaks_csv(std::ostream& os, const OrbitRecord& rec) {
    os << "m,n_m,height\n";
    for (const Peak& p : rec.peaks) os << p.m << "," << p.n << "," << format_scalar(p.height) << "\n";
}

}  // namespace skewrg
