// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

extern "C" {
#include <quadmath.h>
}

namespace skewrg {

using quad = __float128;

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// forward-mode dual number: value and one directional derivative
template <class T>
struct Dual {
    T v{}, d{};
    Dual() = default;
    Dual(T value) : v(value) {}
    Dual(int value) : v(value) {}
    Dual(T value, T deriv) : v(value), d(deriv) {}
    template <class U = T, class = std::enable_if_t<!std::is_same_v<U, double>>>
    Dual(double value) : v(value) {}

    Dual& operator+=(const Dual& o) { v += o.v; d += o.d; return *this; }
    Dual& operator-=(const Dual& o) { v -= o.v; d -= o.d; return *this; }
    Dual& operator*=(const Dual& o) { d = d * o.v + v * o.d; v *= o.v; return *this; }
    Dual& operator/=(const Dual& o) {
        T inv = T(1) / o.v;
        v *= inv;
        d = (d - v * o.d) * inv;
        return *this;
    }
};

template <class T> Dual<T> operator+(Dual<T> a, const Dual<T>& b) { return a += b; }
template <class T> Dual<T> operator-(Dual<T> a, const Dual<T>& b) { return a -= b; }
template <class T> Dual<T> operator*(Dual<T> a, const Dual<T>& b) { return a *= b; }
template <class T> Dual<T> operator/(Dual<T> a, const Dual<T>& b) { return a /= b; }
template <class T> Dual<T> operator-(const Dual<T>& a) { return {-a.v, -a.d}; }
template <class T> bool operator<(const Dual<T>& a, const Dual<T>& b) { return a.v < b.v; }
template <class T> bool operator>(const Dual<T>& a, const Dual<T>& b) { return a.v > b.v; }
template <class T> bool operator<=(const Dual<T>& a, const Dual<T>& b) { return a.v <= b.v; }
template <class T> bool operator>=(const Dual<T>& a, const Dual<T>& b) { return a.v >= b.v; }
template <class T> bool operator==(const Dual<T>& a, const Dual<T>& b) { return a.v == b.v && a.d == b.d; }

namespace num {

inline double abs(double x) { return std::fabs(x); }
inline double sqrt(double x) { return std::sqrt(x); }
inline double exp(double x) { return std::exp(x); }
inline double log(double x) { return std::log(x); }
inline double cos(double x) { return std::cos(x); }
inline double sin(double x) { return std::sin(x); }
inline double floor(double x) { return std::floor(x); }
inline double to_double(double x) { return x; }
inline double mag(double x) { return std::fabs(x); }
inline bool finite(double x) { return std::isfinite(x); }
inline bool is_zero(double x) { return x == 0; }

inline long double abs(long double x) { return std::fabs(x); }
inline long double sqrt(long double x) { return std::sqrt(x); }
inline long double exp(long double x) { return std::exp(x); }
inline long double log(long double x) { return std::log(x); }
inline long double cos(long double x) { return std::cos(x); }
inline long double sin(long double x) { return std::sin(x); }
inline long double floor(long double x) { return std::floor(x); }
inline double to_double(long double x) { return double(x); }
inline double mag(long double x) { return double(std::fabs(x)); }
inline bool finite(long double x) { return std::isfinite(x); }
inline bool is_zero(long double x) { return x == 0; }

inline quad abs(quad x) { return fabsq(x); }
inline quad sqrt(quad x) { return sqrtq(x); }
inline quad exp(quad x) { return expq(x); }
inline quad log(quad x) { return logq(x); }
inline quad cos(quad x) { return cosq(x); }
inline quad sin(quad x) { return sinq(x); }
inline quad floor(quad x) { return floorq(x); }
inline double to_double(quad x) { return double(x); }
inline double mag(quad x) { return double(fabsq(x)); }
inline bool finite(quad x) { return finiteq(x); }
inline bool is_zero(quad x) { return x == 0; }

template <class T> Dual<T> abs(const Dual<T>& a) { return a.v < T(0) ? -a : a; }
template <class T> Dual<T> sqrt(const Dual<T>& a) {
    T r = sqrt(a.v);
    return {r, a.d / (T(2) * r)};
}
template <class T> Dual<T> exp(const Dual<T>& a) {
    T e = exp(a.v);
    return {e, e * a.d};
}
template <class T> Dual<T> log(const Dual<T>& a) { return {log(a.v), a.d / a.v}; }
template <class T> Dual<T> cos(const Dual<T>& a) { return {cos(a.v), -sin(a.v) * a.d}; }
template <class T> Dual<T> sin(const Dual<T>& a) { return {sin(a.v), cos(a.v) * a.d}; }
template <class T> Dual<T> floor(const Dual<T>& a) { return {floor(a.v), T(0)}; }
template <class T> double to_double(const Dual<T>& a) { return to_double(a.v); }
template <class T> double mag(const Dual<T>& a) { return mag(a.v) + mag(a.d); }
template <class T> bool finite(const Dual<T>& a) { return finite(a.v) && finite(a.d); }
template <class T> bool is_zero(const Dual<T>& a) { return is_zero(a.v) && is_zero(a.d); }

}  // namespace num

template <class T> T pi() { return T(4) * T(std::atan(1.0)); }
template <> inline quad pi<quad>() { return M_PIq; }
template <> inline Dual<quad> pi<Dual<quad>>() { return Dual<quad>(M_PIq); }

// golden mean (sqrt(5)-1)/2 in the working precision
template <class T> T golden() { return (num::sqrt(T(5)) - T(1)) / T(2); }

// Parse a decimal string at full precision of T.
template <class T> T parse_scalar(const std::string& s);
template <> inline double parse_scalar<double>(const std::string& s) {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("bad number: " + s);
    return v;
}
template <> inline quad parse_scalar<quad>(const std::string& s) {
    char* end = nullptr;
    quad v = strtoflt128(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') throw std::invalid_argument("bad number: " + s);
    return v;
}

inline std::string format_scalar(double x, int digits = 17) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*e", digits - 1, x);
    return buf;
}
inline std::string format_scalar(quad x, int digits = 34) {
    char buf[128];
    quadmath_snprintf(buf, sizeof buf, "%.*Qe", digits - 1, x);
    return buf;
}

// 31-digit published critical energy; used where the bootstrap value is too coarse
inline const char* kEstarDecimal = "2.5975151853767716484693511092199";

}  // namespace skewrg
