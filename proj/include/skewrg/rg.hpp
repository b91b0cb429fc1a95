// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "skewrg/skew.hpp"

namespace skewrg {

// F = (1, B) and G = (alpha*, A)
template <class T>
struct Pair {
    SkewMap<T> F, G;
    double rho_f() const { return F.m.rho(); }
    double rho_g() const { return G.m.rho(); }
    int degree() const { return F.m.degree(); }
};

template <class U, class T>
Pair<U> pair_convert(const Pair<T>& p) {
    return {{U(p.F.alpha), mf_convert<U>(p.F.m)}, {U(p.G.alpha), mf_convert<U>(p.G.m)}};
}

template <class T>
struct RGResult {
    Pair<T> pair;
    T sigma;
    double parity_drift = 0;  // before projection
    double det_drift = 0;     // sup-norm bound of det - 1 before normalization
};

// nullopt when fine, otherwise the violated inequality
std::optional<std::string> single_domain_violation(double rho_f, double rho_g);
std::optional<std::string> three_domain_violation(double rho_f, double rho_g);

template <class T> RGResult<T> rg_single(const Pair<T>& p, double ratio = 1.0);
template <class T> RGResult<T> rg_three_palindromic(const Pair<T>& p, double ratio = 1.0);
template <class T> RGResult<T> rg_full(const Pair<T>& p, double ratio = 1.0);
template <class T> Pair<T> project_reversible(const Pair<T>& p);
template <class T> double pair_parity_drift(const Pair<T>& p);
template <class T> T pair_norm(const Pair<T>& p);
template <class T> Pair<T> pair_sub(const Pair<T>& a, const Pair<T>& b);

// Coordinates on reversible pairs: for B0 then A0, the even coefficients of
// t, u, v and the odd coefficients of s, each weighted by rho^n.
struct Chart {
    int N = 80;
    double rho_f = 3.0, rho_g = 2.0;
    int size() const { return 2 * (3 * (N / 2 + 1) + (N + 1) / 2); }
};

template <class T> std::vector<T> to_vec(const Pair<T>& p);
template <class T> Pair<T> from_vec(const std::vector<T>& x, const Chart& ch);
template <class T> Chart chart_of(const Pair<T>& p) { return {p.degree(), p.rho_f(), p.rho_g()}; }

enum class Operator { full, three };
enum class JacMethod { dual, central_fd };

// operator in chart coordinates
template <class T> std::vector<T> op_vec(const std::vector<T>& x, const Chart& ch, Operator op, double ratio = 1.0);

struct Jacobian {
    int n = 0;
    std::vector<double> a;  // row major
    Chart chart;
    Operator op = Operator::full;
    JacMethod method = JacMethod::dual;
    std::string precision;
    double operator()(int i, int j) const { return a[size_t(i) * n + j]; }
};

template <class T> Jacobian build_jacobian(const Pair<T>& p, Operator op, JacMethod method, double ratio = 1.0);
// single column, for cross-checks between methods
template <class T> std::vector<double> jacobian_column(const Pair<T>& p, Operator op, JacMethod method, int j, double ratio = 1.0);

// (I - J)^{-1}, kept factored
class ResolventSolver {
  public:
    explicit ResolventSolver(const Jacobian& J);
    ~ResolventSolver();
    ResolventSolver(const ResolventSolver&) = delete;
    ResolventSolver& operator=(const ResolventSolver&) = delete;
    std::vector<double> solve(const std::vector<double>& rhs) const;
    int size() const;

  private:
    struct Impl;
    Impl* impl_;
};

// M(p) = F(Pbar + (I - M) p) - Pbar + M p with I - M = (I - J)^{-1}
template <class T>
std::vector<T> quasi_newton_map(const Pair<T>& pbar, const ResolventSolver& K, const std::vector<T>& p, double ratio = 1.0);

struct ContractionEstimate {
    double epsilon = 0;  // |M(0)|
    double K = 0;        // sampled sup of |DM(p) h| over |p| <= delta, |h| = 1
    double delta = 0;
    bool ok() const { return K < 0.75 && epsilon + K * delta < delta; }
};
ContractionEstimate contraction_estimate(const Pair<quad>& pbar, const ResolventSolver& K, double delta, int samples,
                                         unsigned seed, double ratio = 1.0);

struct SolveOptions {
    double tol = 1e-20;  // residual target in the weighted l1 norm
    int max_iter = 40;
    double ratio = 1.0;
    bool verbose = false;
};
struct SolveResult {
    Pair<quad> pair;
    quad sigma;
    double residual = 0;
    int iterations = 0;
    int jacobians = 0;
    std::vector<double> history;
};
SolveResult solve_fixed_point(const Pair<double>& seed, const SolveOptions& opt);
// continue from a quad-precision pair (used for radius changes and alternative rules)
SolveResult solve_fixed_point(const Pair<quad>& seed, const SolveOptions& opt);

struct Eigenvalue {
    std::complex<double> z;
    std::string tag = "nontrivial";
};
std::vector<Eigenvalue> jacobian_spectrum(const Jacobian& J);

struct FamilyCheck {
    std::string family;  // e.g. "kappa", "kappa+", "kappa-", "eta"
    int n = 0;
    double predicted = 0;
    bool present = false;
    double closest = 0;
};
std::vector<FamilyCheck> classify_trivial_eigenvalues(std::vector<Eigenvalue>& spectrum, double sigma, int n_max = 3,
                                                      double rel_tol = 1e-4);

// commutator F G (G F)^{-1}, normalized to unit determinant, in z = x - 1/(2 alpha)
template <class T> MatrixFn<T> commutator(const Pair<T>& p);
double commutator_recursion_residual(const Pair<quad>& p, quad sigma, int samples = 25, double zmax = 0.5);

struct AiCiReport {
    std::complex<double> theta1, theta2;  // eigenvalues of A1(0)
    double detA1 = 0;
    double arg_margin = 0;  // distance of arg(theta^2) from {0, pi}
    std::complex<double> c1, c2;  // eigenvalues of C1(0)
    double minus_one_margin = 0;
    double c_identity_dist = 0;
    bool theta_ok() const { return arg_margin > 1e-3; }
    bool c_ok() const { return minus_one_margin > 1e-3; }
};
AiCiReport check_aici(const Pair<quad>& p, quad sigma);

}  // namespace skewrg
