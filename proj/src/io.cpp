// SPDX-License-Identifier: Apache-2.0
#include "skewrg/io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace skewrg {

namespace {

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

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t"), b = s.find_last_not_of(" \t");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

}  // namespace

void write_skew(std::ostream& os, const SkewMap<quad>& h) {
    os << "alpha=" << format_scalar(h.alpha, 36) << " rho=" << format_scalar(h.m.rho()) << "\n";
    const char* names[4] = {"t", "u", "v", "s"};
    const Series<quad>* comps[4] = {&h.m.t, &h.m.u, &h.m.v, &h.m.s};
    for (int k = 0; k < 4; ++k) {
        os << names[k] << "\n";
        write_series(os, *comps[k]);
    }
}

SkewMap<quad> read_skew(std::istream& is, int& line_no) {
    std::string line;
    if (!next_line(is, line, line_no)) fail(line_no, "expected skew header, got end of input");
    std::istringstream hs(line);
    std::string a, r;
    hs >> a >> r;
    if (a.rfind("alpha=", 0) != 0 || r.rfind("rho=", 0) != 0) fail(line_no, "malformed skew header '" + line + "'");
    SkewMap<quad> h;
    double rho;
    try {
        h.alpha = parse_scalar<quad>(a.substr(6));
        rho = parse_scalar<double>(r.substr(4));
    } catch (const std::exception&) {
        fail(line_no, "malformed skew header '" + line + "'");
    }
    const char* names[4] = {"t", "u", "v", "s"};
    Series<quad>* comps[4] = {&h.m.t, &h.m.u, &h.m.v, &h.m.s};
    for (int k = 0; k < 4; ++k) {
        if (!next_line(is, line, line_no) || trim(line) != names[k])
            fail(line_no, std::string("expected block label '") + names[k] + "'");
        *comps[k] = read_series_quad(is, line_no);
        if (std::abs(comps[k]->rho() - rho) > 1e-12 * rho) fail(line_no, "series radius differs from the skew header");
        if (comps[k]->degree() != comps[0]->degree()) fail(line_no, "series degrees differ within one matrix");
    }
    return h;
}

void write_pair(std::ostream& os, const Pair<quad>& p) {
    write_skew(os, p.F);
    os << "---\n";
    write_skew(os, p.G);
}

Pair<quad> read_pair(std::istream& is) {
    int line_no = 0;
    Pair<quad> p;
    p.F = read_skew(is, line_no);
    std::string line;
    if (!next_line(is, line, line_no) || trim(line) != "---") fail(line_no, "expected separator '---'");
    p.G = read_skew(is, line_no);
    if (p.F.m.degree() != p.G.m.degree()) fail(line_no, "F and G have different truncation degrees");
    return p;
}

void save_pair(const std::string& path, const Pair<quad>& p) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot write " + path);
    write_pair(os, p);
    if (!os) throw IoError("write failed: " + path);
}

Pair<quad> load_pair(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path);
    try {
        return read_pair(is);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

std::map<std::string, std::string> read_key_values(std::istream& is) {
    std::map<std::string, std::string> kv;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) fail(line_no, "expected key = value");
        std::string k = trim(line.substr(0, eq)), v = trim(line.substr(eq + 1));
        if (k.empty()) fail(line_no, "empty key");
        kv[k] = v;
    }
    return kv;
}

}  // namespace skewrg
