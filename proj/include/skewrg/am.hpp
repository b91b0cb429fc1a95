// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "skewrg/rg.hpp"

namespace skewrg {

// potential V(x) = 2 lambda cos(2 pi (x + xi)); the cocycle is reversible
// with reversor c = 0 exactly when xi = alpha/2 (mod 1/2)
struct AMParams {
    double lambda = 1.0;
    double xi = 0.0;
    double E = 0.0;
    double alpha = (std::sqrt(5.0) - 1) / 2;
};

// xi that makes the translated cocycle even about 0
inline double reversible_phase(double alpha) { return alpha / 2; }

template <class T>
Pair<T> am_pair(T lambda, T E, T xi, T alpha, int N, double rho_f, double rho_g);
Pair<double> am_pair(const AMParams& p, int N, double rho_f, double rho_g);

// A(x + (q-1) alpha) ... A(x) in the original basis, A(x) = [[E - V(x), -1], [1, 0]]
template <class T>
Mat2<T> transfer_product(T lambda, T E, T xi, T alpha, int q, T x);
Mat2<double> transfer_product(const AMParams& p, int q, double x);

struct ChambersResult {
    double value = 0;     // trace at x = 1/(4q)
    double residual = 0;  // max over sampled x of the identity defect
};
double chambers_value(int p, int q, double lambda, double E);
ChambersResult chambers_trace(int p, int q, double lambda, double E, int samples = 16, unsigned seed = 1);

struct Band {
    int q = 1, p = 0;
    int index = 0;  // 1-based from the bottom
    double lo = 0, hi = 0;
};
std::vector<Band> spectrum_bands(int p, int q, double lambda, double tol = 1e-10);

double rotation_number(const AMParams& prm, long N, double x0 = 0.0);

// k minimizing the distance of 2 rot - k alpha to Z, |k| <= kmax
struct GapLabel {
    int k = 0;
    double rot = 0;
    double defect = 0;
};
GapLabel label_from_rotation(double rot, double alpha, int kmax);
GapLabel gap_label(double alpha, double E, double lambda, int kmax, long N = 1000000);

struct Gap {
    int q = 1, p = 0;
    int k = 0;      // gap index
    int below = 0;  // bands below the gap
    double lo = 0, hi = 0;
    double rot = 0;
};
// open gaps between consecutive bands of p/q, labelled exactly from the band count
std::vector<Gap> rational_gaps(const std::vector<Band>& bands);
int rational_label(int p, int q, int bands_below);

struct ButterflyData {
    int qmax = 0;
    double lambda = 1;
    std::vector<Band> bands;
    std::vector<Gap> gaps;
};
ButterflyData butterfly_scan(int qmax, double lambda);
void write_bands_csv(std::ostream& os, const std::vector<Band>& b);
void write_gaps_csv(std::ostream& os, const std::vector<Gap>& g);

struct SvgView {
    double a0 = 0, a1 = 1, e0 = -4, e1 = 4;
    int width = 800, height = 800;
};
void write_butterfly_svg(std::ostream& os, const ButterflyData& d, const SvgView& view);
// 16-color cycle indexed by k mod 16
const char* gap_color(int k);

// zoom boxes around (alpha*, E*): one generation is one single RG step,
// alpha width shrinks by alpha*^2 and energy depth by mu1^{1/3}
struct ZoomBox {
    int generation = 0;
    double a0 = 0, a1 = 0, e0 = 0, e1 = 0;
};
ZoomBox zoom_box(int generation, double estar, double mu1);
struct ZoomGeneration {
    ZoomBox box;
    Gap largest;  // largest gap of the Fibonacci approximant inside the box
    int expected_k = 0;
};
struct ZoomReport {
    int q = 0, p = 0;  // approximant used
    std::vector<ZoomGeneration> gens;
    std::vector<double> depth_ratios;  // d_n / d_{n+3}, d = distance of gap k_n from E*
    double mean_ratio = 0;
};
ZoomReport zoom_analysis(int generations, double estar, double mu1, int q_index = 13);
ButterflyData zoom_scan(const ZoomBox& box, int qmax, double lambda);

// Fibonacci numbers f(1) = f(2) = 1
long long fib(int m);

struct BootstrapOptions {
    double lo = 2.0, hi = 3.0;
    double tol = 1e-12;
    int N = 80;
    double rho_f = 3.0, rho_g = 2.0;
    int max_steps = 60;
    int seed_steps = 24;
    // classification thresholds for the trace of G after every third step
    double trace_low = 0.0, trace_high = 100.0;
};
// +1 above E*, -1 below, 0 undecided within max_steps
struct Classification {
    int sign = 0;
    int steps = 0;
};
Classification classify_energy(double E, const BootstrapOptions& opt);
struct BootstrapResult {
    double Estar = 0;
    int bisections = 0;
    Pair<double> seed;
};
BootstrapResult bootstrap_Estar(const BootstrapOptions& opt);

}  // namespace skewrg
