// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "skewrg/scalar.hpp"

namespace skewrg {

// Enclosure [c-r, c+r]. Each op widens the radius by one relative
// epsilon of the result magnitude in place of directed rounding.
struct Ball {
    double c = 0.0;
    double r = 0.0;

    Ball() = default;
    Ball(double center) : c(center) {}
    Ball(int center) : c(center) {}
    Ball(double center, double radius);

    double lo() const;
    double hi() const;
    bool contains(double x) const { return lo() <= x && x <= hi(); }
    bool contains(quad x) const { return quad(lo()) <= x && x <= quad(hi()); }

    Ball& operator+=(const Ball& o);
    Ball& operator-=(const Ball& o);
    Ball& operator*=(const Ball& o);
    Ball& operator/=(const Ball& o);
};

Ball operator+(Ball a, const Ball& b);
Ball operator-(Ball a, const Ball& b);
Ball operator*(Ball a, const Ball& b);
Ball operator/(Ball a, const Ball& b);
Ball operator-(const Ball& a);
// ordering by center, for generic code that branches on sign
inline bool operator<(const Ball& a, const Ball& b) { return a.c < b.c; }
inline bool operator>(const Ball& a, const Ball& b) { return a.c > b.c; }

Ball ball_add(const Ball& a, const Ball& b);
Ball ball_sub(const Ball& a, const Ball& b);
Ball ball_mul(const Ball& a, const Ball& b);
Ball ball_div(const Ball& a, const Ball& b);
Ball ball_sqrt(const Ball& a);
Ball ball_abs(const Ball& a);
Ball ball_log(const Ball& a);
Ball ball_exp(const Ball& a);

namespace num {
inline Ball abs(const Ball& a) { return ball_abs(a); }
inline Ball sqrt(const Ball& a) { return ball_sqrt(a); }
inline Ball exp(const Ball& a) { return ball_exp(a); }
inline Ball log(const Ball& a) { return ball_log(a); }
inline double to_double(const Ball& a) { return a.c; }
inline double mag(const Ball& a) { return std::fabs(a.c) + a.r; }
inline bool finite(const Ball& a) { return std::isfinite(a.c) && std::isfinite(a.r); }
inline bool is_zero(const Ball& a) { return a.c == 0 && a.r == 0; }
}  // namespace num

template <> inline Ball golden<Ball>() { return Ball(0.6180339887498949, 1.2e-16); }

// adds a nonnegative bound to the radius (no-op for point scalars)
inline void widen(Ball& a, double extra) { a.r += extra; }
template <class T> void widen(T&, double) {}

}  // namespace skewrg
