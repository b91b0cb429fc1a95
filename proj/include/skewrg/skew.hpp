// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <limits>

#include "skewrg/series.hpp"

namespace skewrg {

template <class T> double unit_roundoff() { return std::numeric_limits<double>::epsilon() / 2; }
template <> inline double unit_roundoff<quad>() { return 0x1p-113; }
template <> inline double unit_roundoff<Dual<quad>>() { return 0x1p-113; }
template <> inline double unit_roundoff<long double>() { return 0x1p-64; }

// pointwise 2x2 matrix [[a, b], [c, d]]
template <class T>
struct Mat2 {
    T a, b, c, d;
    T det() const { return a * d - b * c; }
    T trace() const { return a + d; }
};

template <class T>
Mat2<T> operator*(const Mat2<T>& x, const Mat2<T>& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}

// A0(x) = [[t+s, u], [v, t-s]]; reversible when t,u,v are even and s is odd
template <class T>
struct MatrixFn {
    Series<T> t, u, v, s;

    int degree() const { return t.degree(); }
    double rho() const { return t.rho(); }

    static MatrixFn constant(int N, double rho, T t0, T u0, T v0, T s0) {
        return {Series<T>::constant(N, rho, t0), Series<T>::constant(N, rho, u0),
                Series<T>::constant(N, rho, v0), Series<T>::constant(N, rho, s0)};
    }
    static MatrixFn identity(int N, double rho) { return constant(N, rho, T(1), T(0), T(0), T(0)); }
};

template <class T>
MatrixFn<T> mf_mul(const MatrixFn<T>& x, const MatrixFn<T>& y) {
    Series<T> xa = x.t + x.s, xd = x.t - x.s, ya = y.t + y.s, yd = y.t - y.s;
    Series<T> pa = xa * ya + x.u * y.v;
    Series<T> pd = x.v * y.u + xd * yd;
    Series<T> pb = xa * y.u + x.u * yd;
    Series<T> pc = x.v * ya + xd * y.v;
    const T half = T(1) / T(2);
    return {s_scale(pa + pd, half), pb, pc, s_scale(pa - pd, half)};
}

template <class T>
MatrixFn<T> mf_adj(const MatrixFn<T>& x) {
    const T m1 = T(-1);
    return {x.t, s_scale(x.u, m1), s_scale(x.v, m1), s_scale(x.s, m1)};
}

template <class T>
Series<T> mf_det(const MatrixFn<T>& x) {
    return x.t * x.t - x.s * x.s - x.u * x.v;
}

template <class T>
MatrixFn<T> mf_affine(const MatrixFn<T>& x, const T& a, const T& b, double rho_out) {
    return {s_affine(x.t, a, b, rho_out), s_affine(x.u, a, b, rho_out), s_affine(x.v, a, b, rho_out),
            s_affine(x.s, a, b, rho_out)};
}

template <class T>
MatrixFn<T> mf_scale(const MatrixFn<T>& x, const T& k) {
    return {s_scale(x.t, k), s_scale(x.u, k), s_scale(x.v, k), s_scale(x.s, k)};
}

template <class T>
MatrixFn<T> mf_sub(const MatrixFn<T>& x, const MatrixFn<T>& y) {
    return {x.t - y.t, x.u - y.u, x.v - y.v, x.s - y.s};
}

template <class T>
MatrixFn<T> mf_add(const MatrixFn<T>& x, const MatrixFn<T>& y) {
    return {x.t + y.t, x.u + y.u, x.v + y.v, x.s + y.s};
}

// entries in the new basis at a point of the disk
template <class T>
Mat2<T> mf_eval(const MatrixFn<T>& x, const T& z) {
    T t = s_eval(x.t, z), s = s_eval(x.s, z);
    return {t + s, s_eval(x.u, z), s_eval(x.v, z), t - s};
}

// sum of the weighted l1 norms of the four components
template <class T>
T mf_norm(const MatrixFn<T>& x) {
    return s_norm(x.t) + s_norm(x.u) + s_norm(x.v) + s_norm(x.s);
}

template <class T>
double mf_parity_drift(const MatrixFn<T>& x) {
    return s_parity_drift(x.t, Parity::even) + s_parity_drift(x.u, Parity::even) +
           s_parity_drift(x.v, Parity::even) + s_parity_drift(x.s, Parity::odd);
}

template <class T>
MatrixFn<T> mf_project_reversible(const MatrixFn<T>& x) {
    return {s_project_parity(x.t, Parity::even).first, s_project_parity(x.u, Parity::even).first,
            s_project_parity(x.v, Parity::even).first, s_project_parity(x.s, Parity::odd).first};
}

template <class U, class T>
MatrixFn<U> mf_convert(const MatrixFn<T>& x) {
    return {s_convert<U>(x.t), s_convert<U>(x.u), s_convert<U>(x.v), s_convert<U>(x.s)};
}

// (x, y) -> (x + alpha, A(x) y), stored through A0(x) = A(x - alpha/2)
template <class T>
struct SkewMap {
    T alpha;
    MatrixFn<T> m;
};

// outer (beta, B) after inner (alpha, A): C0(x) = B0(x + alpha/2) A0(x - beta/2)
template <class T>
SkewMap<T> sk_compose(const SkewMap<T>& outer, const SkewMap<T>& inner, double rho_out) {
    const T half = T(1) / T(2);
    MatrixFn<T> b = mf_affine(outer.m, T(1), inner.alpha * half, rho_out);
    MatrixFn<T> a = mf_affine(inner.m, T(1), -(outer.alpha * half), rho_out);
    return {outer.alpha + inner.alpha, mf_mul(b, a)};
}

// projective inverse: adjugate, no determinant division
template <class T>
SkewMap<T> sk_inverse(const SkewMap<T>& h) {
    return {-h.alpha, mf_adj(h.m)};
}

// G after F after G
template <class T>
SkewMap<T> sk_gfg(const SkewMap<T>& f, const SkewMap<T>& g, double rho_out) {
    double mid = rho_out + num::mag(g.alpha) / 2;
    SkewMap<T> fg = sk_compose(f, g, mid);
    return sk_compose(g, fg, rho_out);
}

// k = (1 + w)^(-1/2) for a series w with norm < 1
template <class T>
Series<T> inv_sqrt_series(const Series<T>& w) {
    // value parts only: for dual numbers the derivative series converges with the same ratio
    double q = w.tail(), pw_r = 1;
    for (int n = 0; n <= w.degree(); ++n, pw_r *= w.rho()) q += std::fabs(num::to_double(w[n])) * pw_r;
    if (!(q < 1.0)) throw DomainError("normalization: |det - 1| has norm " + std::to_string(q) + " >= 1");
    Series<T> sum = Series<T>::constant(w.degree(), w.rho(), T(1));
    if (q == 0.0) return sum;
    Series<T> pw = sum;
    double coef = 1.0, bound = 1.0;
    const double eps = unit_roundoff<T>() * 0.01;
    T b(1);
    for (int k = 1; k < 4000; ++k) {
        b = b * T(-(2 * k - 1)) / T(2 * k);
        coef *= (2.0 * k - 1) / (2.0 * k);
        bound *= q;
        pw = pw * w;
        sum = sum + s_scale(pw, b);
        if (coef * bound * (k + 1) < eps) break;
    }
    return sum;
}

template <class T>
SkewMap<T> sk_normalize(const SkewMap<T>& h) {
    Series<T> det = mf_det(h.m);
    det[0] -= T(1);
    Series<T> k = inv_sqrt_series(det);
    return {h.alpha, {k * h.m.t, k * h.m.u, k * h.m.v, k * h.m.s}};
}

// directional derivative of A -> det(A)^(-1/2) A along dA
template <class T>
MatrixFn<T> sk_dnormalize(const SkewMap<T>& h, const MatrixFn<T>& dA) {
    const MatrixFn<T>& A = h.m;
    Series<T> det = mf_det(A);
    det[0] -= T(1);
    Series<T> k = inv_sqrt_series(det);
    Series<T> k3 = k * k * k;
    const T two = T(2);
    Series<T> ddet = s_scale(A.t * dA.t, two) - s_scale(A.s * dA.s, two) - dA.u * A.v - A.u * dA.v;
    Series<T> c = s_scale(k3 * ddet, T(-1) / two);
    return {k * dA.t + c * A.t, k * dA.u + c * A.u, k * dA.v + c * A.v, k * dA.s + c * A.s};
}

// sigma with |e^{-2 sigma} u0(0)| = ratio |e^{2 sigma} v0(0)|; ratio 1 is the default rule
template <class T>
T sk_equalize_sigma(const SkewMap<T>& h, double ratio = 1.0) {
    T u0 = h.m.u[0], v0 = h.m.v[0];
    if (num::is_zero(u0) || num::is_zero(v0)) throw DomainError("equalization undefined: u0(0) or v0(0) vanishes");
    return num::log(num::abs(u0 / (T(ratio) * v0))) / T(4);
}

// conjugation by L = S e^{sigma S} after the substitution x -> c x
template <class T>
SkewMap<T> sk_scale(const SkewMap<T>& h, const T& c, const T& sigma, double rho_out) {
    if (!(num::to_double(c) > 0 && num::to_double(c) <= 1.0 + 1e-15))
        throw std::invalid_argument("scaling contraction must lie in (0,1]");
    MatrixFn<T> m = mf_affine(h.m, c, T(0), rho_out);
    m.u = s_scale(m.u, -num::exp(T(-2) * sigma));
    m.v = s_scale(m.v, -num::exp(T(2) * sigma));
    return {h.alpha / c, m};
}

}  // namespace skewrg
