#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "isingpl/coupling.hpp"
#include "isingpl/rng.hpp"

namespace ising {

struct IsingParams {
    double beta = 0;     // inverse temperature
    double b_field = 0;  // external field B
    bool in_theta() const { return beta > 0 && b_field != 0; }
};

// Spin configuration: every entry is exactly -1 or +1.
using SpinConfig = std::vector<int>;

struct LocalFields {
    std::vector<double> m;  // m_i = sum_j A(i,j) x_j
    double mean = 0;
};

LocalFields local_fields(const CouplingMatrix& A, const SpinConfig& x);

// P(X_i = +1 | rest) = 1 / (1 + exp(-2 (beta*m_i + B))), saturating without
// overflow for large arguments.
double conditional_prob(const IsingParams& p, double m_i);

// f_n(x) = (beta/2) x'Ax + B sum_i x_i
double hamiltonian(const CouplingMatrix& A, const IsingParams& p, const SpinConfig& x);

// b_i = tanh(beta*m_i + B)
std::vector<double> b_field_vector(const CouplingMatrix& A, const IsingParams& p,
                                   const SpinConfig& x);

enum class SpinInit { Random, AllPlus, Given };

// Single-site Gibbs sampler.  Systematic scan by default; local fields are
// maintained incrementally.
class GlauberChain {
public:
    GlauberChain(const CouplingMatrix& A, IsingParams p, Rng rng,
                 SpinInit init = SpinInit::Random, const SpinConfig* given = nullptr,
                 bool random_scan = false);

    void sweep();                // n single-site updates
    void run(int sweeps);
    const SpinConfig& state() const { return x_; }
    const std::vector<double>& fields() const { return m_; }

private:
    void update_site(int i);
    const CouplingMatrix& A_;
    IsingParams p_;
    Rng rng_;
    bool random_scan_;
    SpinConfig x_;
    std::vector<double> m_;
};

SpinConfig glauber_sample(const CouplingMatrix& A, const IsingParams& p, int sweeps,
                          SpinInit init, std::uint64_t seed,
                          const SpinConfig* given = nullptr);

// Exact distribution by enumeration, n <= 20.  probs indexed by the bit
// pattern with bit i set iff x_i = +1.
struct ExactTable {
    int n = 0;
    std::vector<double> probs;
    double log_z = 0;
};

ExactTable exact_distribution(const CouplingMatrix& A, const IsingParams& p);

// Exact one-shot sample from the Ising model on the scaled complete graph
// A(i,j) = 1/(n-1): draws the plus-spin count from its exact marginal, then
// places the plus spins uniformly at random.
SpinConfig cw_exact_sample(int n, const IsingParams& p, std::uint64_t seed);

// Spin file format: one line of space-separated +1 / -1 values.
std::string spins_to_string(const SpinConfig& x);
SpinConfig spins_from_string(const std::string& line);
SpinConfig load_spins_file(const std::string& path);
void save_spins_file(const std::string& path, const SpinConfig& x);

}  // namespace ising
