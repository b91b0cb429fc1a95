// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "skewrg/rg.hpp"

namespace skewrg {

// alpha=<dec> rho=<dec>, then labeled series blocks t, u, v, s
void write_skew(std::ostream& os, const SkewMap<quad>& h);
SkewMap<quad> read_skew(std::istream& is, int& line_no);

// F, a line "---", then G
void write_pair(std::ostream& os, const Pair<quad>& p);
Pair<quad> read_pair(std::istream& is);
void save_pair(const std::string& path, const Pair<quad>& p);
Pair<quad> load_pair(const std::string& path);

// truncates or zero-extends the coefficients and relabels the radii
template <class T>
Pair<T> pair_resize(const Pair<T>& p, int N, double rho_f, double rho_g) {
    auto fix = [&](const Series<T>& f, double rho) {
        Series<T> g(N, rho);
        for (int n = 0; n <= std::min(N, f.degree()); ++n) g[n] = f[n];
        return g;
    };
    auto mf = [&](const MatrixFn<T>& m, double rho) {
        return MatrixFn<T>{fix(m.t, rho), fix(m.u, rho), fix(m.v, rho), fix(m.s, rho)};
    };
    return {{p.F.alpha, mf(p.F.m, rho_f)}, {p.G.alpha, mf(p.G.m, rho_g)}};
}

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// key = value lines, '#' starts a comment
std::map<std::string, std::string> read_key_values(std::istream& is);

}  // namespace skewrg
