// SPDX-License-Identifier: Apache-2.0
#include "skewrg/ball.hpp"

#include <algorithm>
#include <limits>

namespace skewrg {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();  // 2^-52
constexpr double kTiny = std::numeric_limits<double>::denorm_min();
constexpr double kInf = std::numeric_limits<double>::infinity();

double up(double x) { return std::nextafter(x, kInf); }
double down(double x) { return std::nextafter(x, -kInf); }

// rounding allowance for a freshly computed center
double slack(double center) { return kEps * std::fabs(center) + kTiny; }

Ball checked(double c, double r) {
    if (!std::isfinite(c) || !std::isfinite(r)) throw NumericError("ball: non-finite result");
    return Ball(c, r);
}

// enclosure of a monotone increasing f on [lo,hi]; each libm call may be off by an ulp
template <class F>
Ball monotone(double lo, double hi, F f) {
    double a = down(down(f(lo)));
    double b = up(up(f(hi)));
    double c = 0.5 * a + 0.5 * b;
    double r = std::max(c - a, b - c);
    return checked(c, up(r + slack(c)));
}

}  // namespace

Ball::Ball(double center, double radius) : c(center), r(radius) {
    if (!(radius >= 0.0)) throw std::invalid_argument("ball: negative radius");
}

double Ball::lo() const { return down(c - r); }
double Ball::hi() const { return up(c + r); }

Ball ball_add(const Ball& a, const Ball& b) {
    double c = a.c + b.c;
    return checked(c, up(a.r + b.r + slack(c)));
}

Ball ball_sub(const Ball& a, const Ball& b) {
    double c = a.c - b.c;
    return checked(c, up(a.r + b.r + slack(c)));
}

Ball ball_mul(const Ball& a, const Ball& b) {
    double c = a.c * b.c;
    double r = std::fabs(a.c) * b.r + std::fabs(b.c) * a.r + a.r * b.r;
    return checked(c, up(up(r) * (1 + 4 * kEps) + slack(c)));
}

Ball ball_div(const Ball& a, const Ball& b) {
    double lo = b.c - b.r, hi = b.c + b.r;
    if (!(lo > 0.0 || hi < 0.0)) throw DomainError("ball: division by an interval containing zero");
    double x = 1.0 / down(lo), y = 1.0 / up(hi);
    double p = down(down(std::min(x, y))), q = up(up(std::max(x, y)));
    double c = 0.5 * p + 0.5 * q;
    Ball inv = checked(c, up(std::max(c - p, q - c) + slack(c)));
    return ball_mul(a, inv);
}

Ball ball_sqrt(const Ball& a) {
    double lo = a.c - a.r;
    if (!(lo > 0.0)) throw DomainError("ball: sqrt of an interval touching <= 0");
    return monotone(down(lo), up(a.c + a.r), [](double x) { return std::sqrt(x); });
}

Ball ball_log(const Ball& a) {
    double lo = down(a.c - a.r);
    if (!(lo > 0.0)) throw DomainError("ball: log of an interval touching <= 0");
    return monotone(lo, up(a.c + a.r), [](double x) { return std::log(x); });
}

Ball ball_exp(const Ball& a) {
    return monotone(down(a.c - a.r), up(a.c + a.r), [](double x) { return std::exp(x); });
}

Ball ball_abs(const Ball& a) {
    double lo = a.c - a.r, hi = a.c + a.r;
    if (lo >= 0.0) return a;
    if (hi <= 0.0) return Ball(-a.c, a.r);
    double top = up(std::max(-lo, hi));
    return checked(0.5 * top, up(0.5 * top + slack(top)));
}

Ball& Ball::operator+=(const Ball& o) { return *this = ball_add(*this, o); }
Ball& Ball::operator-=(const Ball& o) { return *this = ball_sub(*this, o); }
Ball& Ball::operator*=(const Ball& o) { return *this = ball_mul(*this, o); }
Ball& Ball::operator/=(const Ball& o) { return *this = ball_div(*this, o); }

Ball operator+(Ball a, const Ball& b) { return ball_add(a, b); }
Ball operator-(Ball a, const Ball& b) { return ball_sub(a, b); }
Ball operator*(Ball a, const Ball& b) { return ball_mul(a, b); }
Ball operator/(Ball a, const Ball& b) { return ball_div(a, b); }
Ball operator-(const Ball& a) { return Ball(-a.c, a.r); }

}  // namespace skewrg
