#pragma once

#include <vector>

#include "isingpl/model.hpp"

namespace ising {

// Scalar entropy term I(y) = (1+y)/2 log((1+y)/2) + (1-y)/2 log((1-y)/2),
// continuously extended to I(+-1) = 0.  I(0) = -log 2.
double entropy(double y);

// phi(y) = (beta*theta/2) y^2 + B y - I(y)
double phi(double beta, double theta, double b_field, double y);

struct ScalarVariational {
    double beta = 0;
    double theta = 0;     // limiting mean row sum
    double b_field = 0;
    double m0 = 0;        // global maximizer of phi on (-1, 1)
    double phi_at_m0 = 0;
};

// Locates all roots of m = tanh(beta*theta*m + B) by sign scan + bisection,
// then returns the one with the largest phi value (ties broken toward the
// root whose sign matches B).
ScalarVariational magnetization_root(double beta, double theta, double b_field);

// For each beta, B = atanh(m) - m*beta, so that tanh(beta*m + B) = m.
std::vector<IsingParams> param_curve(double m, const std::vector<double>& beta_values);

// (1/sqrt(n)) || beta*A*b + B*1 - atanh(b) ||_2 with b = b_field_vector(A,p,x).
double regularity_residual(const CouplingMatrix& A, const IsingParams& p,
                           const SpinConfig& x);

}  // namespace ising
