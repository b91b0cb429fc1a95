// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "skewrg/ball.hpp"
#include "skewrg/scalar.hpp"

namespace skewrg {

enum class Parity { even, odd, none };

// Truncated Taylor series f_0..f_N on the disk |x| <= rho.
// tail bounds sum_{n>N} |f_n| rho^n; it only enters values in ball mode.
template <class T>
class Series {
  public:
    Series() = default;
    Series(int degree, double rho) : c_(degree + 1, T(0)), rho_(rho) {
        if (degree < 0) throw std::invalid_argument("series: negative degree");
        if (!(rho > 0)) throw std::invalid_argument("series: radius must be positive");
    }
    static Series constant(int degree, double rho, T value) {
        Series s(degree, rho);
        s.c_[0] = value;
        return s;
    }

    int degree() const { return int(c_.size()) - 1; }
    double rho() const { return rho_; }
    double tail() const { return tail_; }
    void set_tail(double t) { tail_ = t; }
    void set_rho(double r) { rho_ = r; }

    T& operator[](int n) { return c_[n]; }
    const T& operator[](int n) const { return c_[n]; }
    std::vector<T>& coeffs() { return c_; }
    const std::vector<T>& coeffs() const { return c_; }

  private:
    std::vector<T> c_;
    double rho_ = 1.0;
    double tail_ = 0.0;
};

namespace detail {
inline void same_shape(double r1, int n1, double r2, int n2) {
    if (n1 != n2) throw std::invalid_argument("series: mismatched degree");
    if (std::abs(r1 - r2) > 1e-12 * std::max(r1, r2)) throw std::invalid_argument("series: mismatched radii");
}
}  // namespace detail

template <class T>
T s_norm(const Series<T>& f) {
    T acc(0), w(1), rho(f.rho());
    for (int n = 0; n <= f.degree(); ++n) {
        acc += num::abs(f[n]) * w;
        w *= rho;
    }
    return acc + T(f.tail());
}

// upper bound of the polynomial part of the norm, as a double
template <class T>
double s_norm_bound(const Series<T>& f) {
    double acc = 0, w = 1;
    for (int n = 0; n <= f.degree(); ++n) {
        acc += num::mag(f[n]) * w;
        w *= f.rho();
    }
    return acc;
}

template <class T>
Series<T> s_add(const Series<T>& f, const Series<T>& g) {
    detail::same_shape(f.rho(), f.degree(), g.rho(), g.degree());
    Series<T> h = f;
    for (int n = 0; n <= f.degree(); ++n) h[n] += g[n];
    h.set_tail(f.tail() + g.tail());
    return h;
}

template <class T>
Series<T> s_sub(const Series<T>& f, const Series<T>& g) {
    detail::same_shape(f.rho(), f.degree(), g.rho(), g.degree());
    Series<T> h = f;
    for (int n = 0; n <= f.degree(); ++n) h[n] -= g[n];
    h.set_tail(f.tail() + g.tail());
    return h;
}

template <class T>
Series<T> s_scale(const Series<T>& f, const T& k) {
    Series<T> h = f;
    for (auto& x : h.coeffs()) x *= k;
    h.set_tail(f.tail() * num::mag(k));
    return h;
}

template <class T>
Series<T> s_mul(const Series<T>& f, const Series<T>& g) {
    detail::same_shape(f.rho(), f.degree(), g.rho(), g.degree());
    const int N = f.degree();
    Series<T> h(N, f.rho());
    for (int i = 0; i <= N; ++i) {
        if (num::is_zero(f[i])) continue;
        const T fi = f[i];
        for (int j = 0; j <= N - i; ++j) h[i + j] += fi * g[j];
    }
    // dropped degrees: sum_{i+j>N} |f_i||g_j| rho^{i+j}, through suffix sums of g
    std::vector<double> fa(N + 1), ga(N + 2, 0.0);
    double w = 1;
    for (int n = 0; n <= N; ++n, w *= f.rho()) {
        fa[n] = num::mag(f[n]) * w;
        ga[n] = num::mag(g[n]) * w;
    }
    for (int n = N - 1; n >= 0; --n) ga[n] += ga[n + 1];
    double over = 0, nf = 0;
    for (int i = 1; i <= N; ++i) over += fa[i] * ga[N - i + 1];
    for (double x : fa) nf += x;
    double ng = ga[0];
    h.set_tail(over + nf * g.tail() + f.tail() * ng + f.tail() * g.tail());
    return h;
}

// g(x) = f(a x + b) on radius rho_out, by Horner re-expansion
template <class T>
Series<T> s_affine(const Series<T>& f, const T& a, const T& b, double rho_out) {
    double reach = num::mag(a) * rho_out + num::mag(b);
    if (reach > f.rho() * (1 + 1e-12))
        throw DomainError("affine image radius " + std::to_string(reach) + " exceeds disk radius " +
                          std::to_string(f.rho()));
    const int N = f.degree();
    Series<T> g(N, rho_out);
    if (num::is_zero(b)) {
        T p(1);
        for (int n = 0; n <= N; ++n, p *= a) g[n] = f[n] * p;
        double ratio = f.rho() > 0 ? reach / f.rho() : 0;
        g.set_tail(f.tail() * std::min(1.0, std::pow(ratio, N + 1)));
        return g;
    }
    std::vector<T>& c = g.coeffs();
    c[0] = f[N];
    int top = 0;
    for (int k = N - 1; k >= 0; --k) {
        int nt = std::min(top + 1, N);
        if (nt > top) c[nt] = a * c[top];
        for (int i = top; i >= 1; --i) c[i] = b * c[i] + a * c[i - 1];
        c[0] = b * c[0] + f[k];
        top = nt;
    }
    // the re-expansion of a degree-N polynomial is exact; only f's own tail carries over
    g.set_tail(f.tail() * std::min(1.0, std::pow(reach / f.rho(), N + 1)));
    return g;
}

template <class T>
T s_eval(const Series<T>& f, const T& x) {
    if (num::mag(x) > f.rho() * (1 + 1e-12)) throw DomainError("series: evaluation outside disk");
    T acc(0);
    for (int n = f.degree(); n >= 0; --n) acc = acc * x + f[n];
    widen(acc, f.tail());
    return acc;
}

// zero the wrong-parity coefficients; second is the discarded mass
template <class T>
std::pair<Series<T>, double> s_project_parity(const Series<T>& f, Parity p) {
    Series<T> g = f;
    double mass = 0, w = 1;
    if (p == Parity::none) return {g, 0.0};
    int drop = p == Parity::even ? 1 : 0;
    for (int n = 0; n <= f.degree(); ++n, w *= f.rho()) {
        if (n % 2 == drop) {
            mass += num::mag(g[n]) * w;
            g[n] = T(0);
        }
    }
    return {g, mass};
}

template <class T>
double s_parity_drift(const Series<T>& f, Parity p) {
    return s_project_parity(f, p).second;
}

template <class T> Series<T> operator+(const Series<T>& f, const Series<T>& g) { return s_add(f, g); }
template <class T> Series<T> operator-(const Series<T>& f, const Series<T>& g) { return s_sub(f, g); }
template <class T> Series<T> operator*(const Series<T>& f, const Series<T>& g) { return s_mul(f, g); }

// change working precision coefficientwise
template <class U, class T>
Series<U> s_convert(const Series<T>& f) {
    Series<U> g(f.degree(), f.rho());
    for (int n = 0; n <= f.degree(); ++n) g[n] = U(f[n]);
    g.set_tail(f.tail());
    return g;
}

void write_series(std::ostream& os, const Series<double>& f);
void write_series(std::ostream& os, const Series<quad>& f);
// line_no is advanced past the consumed lines and quoted in parse errors
Series<double> read_series_double(std::istream& is, int& line_no);
Series<quad> read_series_quad(std::istream& is, int& line_no);

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace skewrg
