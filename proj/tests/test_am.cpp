// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "skewrg/am.hpp"

using namespace skewrg;

namespace {

const double kAlpha = golden<double>();
const double kEstar = 2.5975151853767716;

double total_width(const std::vector<Band>& b) {
    double w = 0;
    for (const Band& x : b) w += x.hi - x.lo;
    return w;
}

}  // namespace

TEST_CASE("AM pair in the new basis") {
    Pair<quad> p0 = am_pair<quad>(0, quad(1.3), 0, golden<quad>(), 40, 3.0, 2.0);
    for (int n = 1; n <= 40; ++n) CHECK(p0.G.m.t[n] == 0);
    CHECK(double(p0.G.m.u[0] - p0.G.m.v[0]) == doctest::Approx(2.0));
    CHECK(s_norm_bound(p0.G.m.s) == 0.0);

    const quad a = golden<quad>();
    Pair<quad> p = am_pair<quad>(1, quad(2.4), a / 2, a, 80, 3.0, 2.0);
    Series<quad> d = mf_det(p.G.m);
    d[0] -= 1;
    CHECK(s_norm_bound(d) < 1e-20);
    CHECK(mf_parity_drift(p.G.m) < 1e-25);
    CHECK(double(p.F.alpha) == 1.0);
    CHECK(double(p.G.alpha) == doctest::Approx(kAlpha));
}

TEST_CASE("reversibility needs the phase alpha/2") {
    Pair<double> good = am_pair<double>(1.0, 2.0, reversible_phase(kAlpha), kAlpha, 80, 3.0, 2.0);
    Pair<double> bad = am_pair<double>(1.0, 2.0, 0.0, kAlpha, 80, 3.0, 2.0);
    CHECK(mf_parity_drift(good.G.m) < 1e-14 * s_norm_bound(good.G.m.t));
    CHECK(mf_parity_drift(bad.G.m) > 1e-3);
}

TEST_CASE("transfer products") {
    AMParams prm;
    prm.lambda = 0.7;
    prm.E = 1.1;
    prm.xi = 0.2;
    Mat2<double> A = transfer_product(prm, 1, 0.3);
    CHECK(A.a == doctest::Approx(1.1 - 1.4 * std::cos(2 * M_PI * 0.5)));
    CHECK(A.b == -1.0);
    CHECK(A.c == 1.0);
    CHECK(A.d == 0.0);

    AMParams free;
    free.lambda = 0;
    free.E = 0;
    Mat2<double> P2 = transfer_product(free, 2, 0.1);
    CHECK(P2.a == -1.0);
    CHECK(P2.d == -1.0);
    CHECK(P2.b == 0.0);
    CHECK(P2.c == 0.0);

    // at E* on the spectrum; the determinant is formed from entries of size |P|, so this runs in quad
    const quad qa = golden<quad>();
    double worst = 0, rel = 0;
    for (int q = 1; q <= 100; ++q) {
        Mat2<quad> Pq = transfer_product<quad>(quad(1), parse_scalar<quad>(kEstarDecimal), quad(0.2), qa, q, quad(0.05 * q));
        worst = std::max(worst, double(fabsq(Pq.det() - 1)));
        Mat2<double> P = transfer_product(prm, q, 0.05 * q);
        double n2 = P.a * P.a + P.b * P.b + P.c * P.c + P.d * P.d;
        rel = std::max(rel, std::fabs(P.det() - 1) / n2);
    }
    CHECK(worst < 1e-12);
    CHECK(rel < 1e-14);
}

TEST_CASE("Chambers formula") {
    CHECK(chambers_value(0, 1, 1.0, 1.7) == doctest::Approx(1.7).epsilon(1e-14));
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> U(0, 1);
    double worst = 0;
    for (int q = 1; q <= 13; ++q)
        for (int p = 0; p < q; ++p) {
            if (std::gcd(p, q) != 1) continue;
            for (int k = 0; k < 8; ++k) {
                double lam = 2 * U(rng), E = -4 + 8 * U(rng);
                worst = std::max(worst, chambers_trace(p, q, lam, E, 8, rng()).residual);
            }
        }
    CHECK(worst < 1e-10);

    for (double E : {0.3, 1.2, 2.5}) CHECK(chambers_value(1, 2, 1.0, E) == doctest::Approx(chambers_value(1, 2, 1.0, -E)));
}

TEST_CASE("bands") {
    std::vector<Band> b1 = spectrum_bands(0, 1, 1.0);
    REQUIRE(b1.size() == 1);
    CHECK(b1[0].lo == doctest::Approx(-4.0));
    CHECK(b1[0].hi == doctest::Approx(4.0));

    std::vector<Band> b2 = spectrum_bands(1, 2, 1.0);
    REQUIRE(b2.size() == 2);
    CHECK(b2[0].lo == doctest::Approx(-b2[1].hi));
    CHECK(b2[0].hi == doctest::Approx(-b2[1].lo));
    CHECK(total_width(b2) < 8.0);

    // edges are zeros of |trace| - 2 and midpoints lie in the spectrum
    std::vector<Band> b8 = spectrum_bands(3, 8, 1.0);
    CHECK(b8.size() == 8);
    for (const Band& b : b8) {
        CHECK(std::fabs(std::fabs(chambers_value(3, 8, 1.0, b.lo)) - 4) < 1e-6);
        CHECK(std::fabs(chambers_value(3, 8, 1.0, 0.5 * (b.lo + b.hi))) <= 4 + 1e-9);
    }

    const int fq[] = {2, 3, 5, 8, 13, 21}, fp[] = {1, 2, 3, 5, 8, 13};
    double prev = 8;
    for (int i = 0; i < 6; ++i) {
        double w = total_width(spectrum_bands(fp[i], fq[i], 1.0));
        CHECK(w < prev);
        prev = w;
    }
}

TEST_CASE("rotation number") {
    AMParams free;
    free.lambda = 0;
    free.E = 0;
    CHECK(rotation_number(free, 100000) == doctest::Approx(0.25).epsilon(1e-4));

    AMParams above;
    above.E = 4.2;
    CHECK(rotation_number(above, 100000) == 0.0);

    AMParams crit;
    crit.E = kEstar;
    crit.xi = reversible_phase(kAlpha);
    CHECK(rotation_number(crit, 1000000) < 1e-5);
    crit.E = kEstar - 1e-3;
    CHECK(rotation_number(crit, 1000000) > 0.0);

    // monotone staircase
    double prev = 1;
    for (int i = 0; i <= 80; ++i) {
        AMParams s;
        s.E = -4.2 + 8.4 * i / 80;
        double r = rotation_number(s, 20000);
        CHECK(r <= prev + 1e-3);
        prev = r;
    }
}

TEST_CASE("gap labels") {
    CHECK(gap_label(kAlpha, 4.5, 1.0, 10, 100000).k == 0);
    GapLabel g = label_from_rotation(0.5 * kAlpha, kAlpha, 10);
    CHECK(g.k == 1);
    CHECK(g.defect < 1e-12);
    CHECK(label_from_rotation(0.5 * (1 - kAlpha), kAlpha, 10).k == -1);
    CHECK(rational_label(3, 8, 1) == -3);  // 3 * 3 = 9 = 1 mod 8, so k = -1 * 3
    for (int below = 1; below < 13; ++below) {
        int k = rational_label(5, 13, below);
        CHECK((((k * 5 + below) % 13) + 13) % 13 == 0);
        CHECK(std::abs(k) <= 6);
    }
}

TEST_CASE("largest positive gap is labelled 1 left of one half") {
    ButterflyData d = butterfly_scan(21, 1.0);
    std::map<std::pair<int, int>, Gap> largest;
    for (const Gap& g : d.gaps)
        if (g.lo > 0 && (largest.count({g.q, g.p}) == 0 || g.hi - g.lo > largest[{g.q, g.p}].hi - largest[{g.q, g.p}].lo))
            largest[{g.q, g.p}] = g;
    int n = 0;
    for (auto& [key, g] : largest) {
        if (key.first < 3) continue;
        CHECK(g.k == (2 * key.second < key.first ? 1 : -1));
        ++n;
    }
    CHECK(n > 100);
    for (const Band& b : d.bands) {
        CHECK(b.lo >= -4 - 1e-9);
        CHECK(b.hi <= 4 + 1e-9);
    }
}

TEST_CASE("zoom labels") {
    ZoomReport z = zoom_analysis(4, kEstar, 30.790054940220962);
    REQUIRE(z.gens.size() == 4);
    const int want[] = {-1, 2, -3, 5};
    for (int n = 0; n < 4; ++n) {
        CHECK(z.gens[n].expected_k == want[n]);
        CHECK(z.gens[n].largest.k == want[n]);
    }
    CHECK(std::fabs(z.mean_ratio / 30.790054940220962 - 1) < 0.1);
    CHECK(fib(1) == 1);
    CHECK(fib(2) == 1);
    CHECK(fib(10) == 55);
}

TEST_CASE("CSV and SVG output") {
    ButterflyData d = butterfly_scan(3, 1.0);
    std::ostringstream b, g, s;
    write_bands_csv(b, d.bands);
    write_gaps_csv(g, d.gaps);
    write_butterfly_svg(s, d, SvgView{});
    CHECK(b.str().rfind("q,p,band_index,E_lo,E_hi\n", 0) == 0);
    CHECK(g.str().rfind("q,p,gap_index_k,E_lo,E_hi,rot\n", 0) == 0);
    CHECK(s.str().find("<svg") != std::string::npos);
    CHECK(s.str().find("</svg>") != std::string::npos);
    CHECK(std::string(gap_color(1)) != std::string(gap_color(2)));
    CHECK(std::string(gap_color(17)) == std::string(gap_color(1)));
}

TEST_CASE("bootstrap of the critical energy") {
    BootstrapOptions o;
    for (double dE : {1e-3, -1e-3}) {
        Classification c = classify_energy(kEstar + dE, o);
        CHECK(c.sign == (dE > 0 ? 1 : -1));
        CHECK(c.steps <= 15);
    }
    BootstrapResult r = bootstrap_Estar(o);
    CHECK(std::fabs(r.Estar - kEstar) < 1e-9);
    CHECK(r.seed.degree() == o.N);
}
