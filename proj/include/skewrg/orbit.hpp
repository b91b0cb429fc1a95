// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "skewrg/am.hpp"

namespace skewrg {

struct Peak {
    int m = 0;  // record number, from 1
    long n = 0;
    double height = 0;
};

struct OrbitRecord {
    double alpha = 0, lambda = 1, xi = 0, x0 = 0;
    quad E = 0;
    std::vector<double> u;  // u_0 .. u_N, with u_{-1} = 1
    std::vector<Peak> peaks;
    double min_u = 0, max_u = 0;
};

// u_{n+1} = (E - V(x_n)) u_n - u_{n-1}, x_n + xi = alpha/2 + n alpha, u_{-1} = u_0 = 1
OrbitRecord eigenfunction_orbit(long n_max, quad E, double lambda = 1.0);
OrbitRecord eigenfunction_orbit(long n_max);  // at the published critical energy

// |u_{n+1} - (E - V(x_n)) u_n + u_{n-1}| / scale at sampled n, recomputed in quad
double orbit_residual(const OrbitRecord& rec, int samples, unsigned seed);

// n(m) = (f(3m + 1) - 1) / 2
long peak_position(int m);

struct PeakGrowth {
    double slope = 0;       // least squares of log height against m
    double ratio = 0;       // slope / (2 sigma)
    int m_lo = 0, m_hi = 0;
};
PeakGrowth peak_growth(const OrbitRecord& rec, double sigma_star, int m_lo = 3, int m_hi = 9);

// (u_{q_m}, u_{q_m - 1}) in the new basis
struct FibReturn {
    int m = 0;
    long q = 0;
    double norm = 0;
    double angle = 0;  // from the line through [1, 0]
};
std::vector<FibReturn> fibonacci_vectors(const OrbitRecord& rec, int m_lo, int m_hi);

struct RecurrenceStep {
    int n = 0;
    double sigma_step = 0;  // exponent chosen at step n
    double sigma_total = 0; // sum of exponents of steps 1..n
    double y_norm = 0;
    double a_norm = 0;      // |A_n(0)|
};
struct RecurrenceReport {
    double E = 0;
    std::vector<RecurrenceStep> steps;
    bool diverged = false;
    int diverged_at = 0;
    std::string reason;
    double sup_y = 0;
    double mean_increment = 0;  // over steps 10..generations
    bool sigma3_positive = false;
    bool bounded() const { return !diverged && sup_y < 10; }
};
// iterates the single-step RG on the self-dual AM pair at energy E in quad precision
RecurrenceReport fibonacci_return(quad E, int generations, int N = 80, double rho_f = 3.0, double rho_g = 2.0);

void write_orbit_csv(std::ostream& os, const OrbitRecord& rec, long stride = 1);
void write_peaks_csv(std::ostream& os, const OrbitRecord& rec);

}  // namespace skewrg
