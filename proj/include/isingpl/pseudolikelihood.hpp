#pragma once

#include <string>
#include <vector>

#include "isingpl/model.hpp"

namespace ising {

// Gradient of the log pseudo-likelihood: Q = dPL/dbeta, R = dPL/dB.
struct PLGradient {
    double q = 0;  // sum_i m_i (x_i - tanh(beta m_i + B))
    double r = 0;  // sum_i (x_i - tanh(beta m_i + B))
    double norm() const;
};

// Negative Hessian (positive semidefinite 2x2).
struct PLHessian {
    double h11 = 0;  // sum m_i^2 sech^2(.)
    double h12 = 0;  // sum m_i   sech^2(.)
    double h22 = 0;  // sum       sech^2(.)
    double det() const { return h11 * h22 - h12 * h12; }
    double min_eigenvalue() const;
};

struct ExistenceVerdict {
    bool exists = true;
    bool a1 = false;  // T_n(x) = 0 (constant local fields)
    bool a2 = false;  // x_i m_i = |m_i| for all i
    bool a3 = false;  // x_i m_i = -|m_i| for all i
    bool a4 = false;  // x = +-1
    std::vector<std::string> failing_sets() const;
};

struct FitOptions {
    double tol = 1e-10;        // on sqrt(Q^2+R^2)/n
    int max_iter = 200;
    double beta0 = 0, b0 = 0;  // Newton start
    bool warm_start = false;   // start from univariate fits instead
};

struct FitResult {
    double beta_hat = 0, b_hat = 0;  // NaN when the estimator does not exist
    ExistenceVerdict verdict;
    int iterations = 0;
    double final_gradient_norm = 0;
    double t_stat = 0;
    double rate_bound = 0;  // 1/(sqrt(n) T_n), +inf when T_n = 0
    PLHessian hessian_at_opt;
};

// Log pseudo-likelihood up to the additive constant -n log 2 (omitted).
double objective(const CouplingMatrix& A, const IsingParams& p, const SpinConfig& x);
PLGradient gradient(const CouplingMatrix& A, const IsingParams& p, const SpinConfig& x);
PLHessian hessian(const CouplingMatrix& A, const IsingParams& p, const SpinConfig& x);

// Empirical variance of the local fields.
double t_stat(const CouplingMatrix& A, const SpinConfig& x);

// Degeneracy sets A1..A4; A1 is tested as T_n <= t_tol (default 1e-12 * gamma^2).
ExistenceVerdict existence_check(const CouplingMatrix& A, const SpinConfig& x,
                                 double t_tol = -1);

// Damped Newton with Armijo backtracking on the strictly concave objective.
// Returns the unique stationary point when the estimator exists; otherwise
// the verdict with NaN estimates.  Throws NonConvergence if the iteration
// cap is hit.
FitResult fit_joint(const CouplingMatrix& A, const SpinConfig& x, FitOptions opts = {});

// Unique root of beta -> Q_n(beta, B_known | x); throws NoRoot when x is in
// an A2/A3-like set or all local fields vanish.
double fit_beta(const CouplingMatrix& A, const SpinConfig& x, double b_known,
                double tol = 1e-12);

// Unique root of B -> R_n(beta_known, B | x); throws NoRoot when x = +-1.
double fit_b(const CouplingMatrix& A, const SpinConfig& x, double beta_known,
             double tol = 1e-12);

// JSON with fields beta_hat, b_hat, exists, failing_sets, iterations,
// grad_norm, t_stat, rate_bound.
std::string fit_result_to_json(const FitResult& r);

}  // namespace ising
