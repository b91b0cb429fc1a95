// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "skewrg/ball.hpp"

using namespace skewrg;

namespace {

struct Sampler {
    std::mt19937_64 rng{12345};
    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
    Ball ball(double a, double b) { return Ball(uniform(a, b), uniform(0, 0.2) * std::pow(10.0, uniform(-12, 0))); }
    double point(const Ball& x) { return x.c + x.r * uniform(-1, 1); }
};

// containment over 10^4 samples, reference in long double
int misses(const std::function<Ball(const Ball&, const Ball&)>& op,
           const std::function<long double(long double, long double)>& ref, double alo, double ahi, double blo,
           double bhi) {
    Sampler s;
    int bad = 0;
    for (int i = 0; i < 10000; ++i) {
        Ball a = s.ball(alo, ahi), b = s.ball(blo, bhi);
        double x = s.point(a), y = s.point(b);
        Ball z = op(a, b);
        long double v = ref(x, y);
        if (!(z.lo() <= v && v <= z.hi())) ++bad;
    }
    return bad;
}

}  // namespace

TEST_CASE("exact integers") {
    Ball two = Ball(1.0) + Ball(1.0);
    CHECK(two.contains(2.0));
    CHECK(two.r >= 0);
}

TEST_CASE("inexact decimal product has positive radius") {
    Ball p = Ball(0.1) * Ball(10.0);
    CHECK(p.contains(1.0));
    CHECK(p.r > 0);
}

TEST_CASE("containment of binary operations") {
    CHECK(misses(ball_add, [](long double x, long double y) { return x + y; }, -5, 5, -5, 5) == 0);
    CHECK(misses(ball_sub, [](long double x, long double y) { return x - y; }, -5, 5, -5, 5) == 0);
    CHECK(misses(ball_mul, [](long double x, long double y) { return x * y; }, -5, 5, -5, 5) == 0);
    CHECK(misses(ball_div, [](long double x, long double y) { return x / y; }, -5, 5, 0.5, 7) == 0);
    CHECK(misses(ball_div, [](long double x, long double y) { return x / y; }, -5, 5, -7, -0.5) == 0);
}

TEST_CASE("containment of unary operations") {
    auto un = [](Ball (*f)(const Ball&), long double (*g)(long double), double lo, double hi) {
        return misses([f](const Ball& a, const Ball&) { return f(a); }, [g](long double x, long double) { return g(x); },
                      lo, hi, 0, 1);
    };
    CHECK(un(ball_sqrt, [](long double x) { return sqrtl(x); }, 0.5, 100) == 0);
    CHECK(un(ball_abs, [](long double x) { return fabsl(x); }, -3, 3) == 0);
    CHECK(un(ball_log, [](long double x) { return logl(x); }, 0.5, 100) == 0);
    CHECK(un(ball_exp, [](long double x) { return expl(x); }, -20, 20) == 0);
}

TEST_CASE("abs of a ball straddling zero") {
    Ball a(0.1, 0.3);
    Ball b = ball_abs(a);
    CHECK(b.contains(0.0));
    CHECK(b.contains(0.4));
    CHECK(b.lo() <= 0.0);
}

TEST_CASE("domain errors") {
    CHECK_THROWS_AS(ball_div(Ball(1.0), Ball(0.0, 0.1)), DomainError);
    CHECK_THROWS_AS(ball_sqrt(Ball(-1.0)), DomainError);
    CHECK_THROWS_AS(ball_log(Ball(0.1, 0.2)), DomainError);
    CHECK_THROWS_AS(Ball(1.0, -1.0), std::invalid_argument);
}

TEST_CASE("overflow is reported") {
    CHECK_THROWS_AS(ball_exp(Ball(1000.0)), NumericError);
    CHECK_THROWS_AS(Ball(1e300) * Ball(1e300), NumericError);
}
