// SPDX-License-Identifier: Apache-2.0
#include "skewrg/series.hpp"

#include <istream>
#include <ostream>
#include <sstream>

namespace skewrg {

namespace {

template <class T>
void write_impl(std::ostream& os, const Series<T>& f, int digits) {
    os << "rho=" << format_scalar(f.rho()) << " n=" << f.degree() << " tail=" << format_scalar(f.tail())
       << "\n";
    for (const T& c : f.coeffs()) os << format_scalar(c, digits) << "\n";
}

bool next_line(std::istream& is, std::string& line, int& line_no) {
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) return true;
    }
    return false;
}

[[noreturn]] void fail(int line_no, const std::string& what) {
    throw ParseError("line " + std::to_string(line_no) + ": " + what);
}

template <class T>
Series<T> read_impl(std::istream& is, int& line_no) {
    std::string line;
    if (!next_line(is, line, line_no)) fail(line_no, "expected series header, got end of input");
    std::istringstream hs(line);
    std::string a, b, c;
    hs >> a >> b >> c;
    if (a.rfind("rho=", 0) != 0 || b.rfind("n=", 0) != 0 || c.rfind("tail=", 0) != 0)
        fail(line_no, "malformed series header '" + line + "'");
    double rho, tail;
    int n;
    try {
        rho = parse_scalar<double>(a.substr(4));
        n = std::stoi(b.substr(2));
        tail = parse_scalar<double>(c.substr(5));
    } catch (const std::exception&) {
        fail(line_no, "malformed series header '" + line + "'");
    }
    if (!(rho > 0) || n < 0 || n > 100000 || !(tail >= 0)) fail(line_no, "invalid series header values");
    Series<T> f(n, rho);
    f.set_tail(tail);
    for (int k = 0; k <= n; ++k) {
        if (!next_line(is, line, line_no)) fail(line_no, "truncated series: expected " + std::to_string(n + 1) + " coefficients");
        try {
            f[k] = parse_scalar<T>(line);
        } catch (const std::exception&) {
            fail(line_no, "bad coefficient '" + line + "'");
        }
        if (!num::finite(f[k])) fail(line_no, "non-finite coefficient");
    }
    return f;
}

}  // namespace

void write_series(std::ostream& os, const Series<double>& f) { write_impl(os, f, 17); }
void write_series(std::ostream& os, const Series<quad>& f) { write_impl(os, f, 36); }
Series<double> read_series_double(std::istream& is, int& line_no) { return read_impl<double>(is, line_no); }
Series<quad> read_series_quad(std::istream& is, int& line_no) { return read_impl<quad>(is, line_no); }

}  // namespace skewrg
