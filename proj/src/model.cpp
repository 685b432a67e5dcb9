#include "isingpl/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "isingpl/errors.hpp"

namespace ising {

namespace {

void check_dims(const CouplingMatrix& A, const SpinConfig& x) {
    if (static_cast<int>(x.size()) != A.n())
        throw DimensionMismatch("spin vector length " + std::to_string(x.size()) +
                                " != coupling dimension " + std::to_string(A.n()));
}

double log_cosh(double z) {
    z = std::fabs(z);
    // log cosh z = z - log 2 + log1p(e^{-2z})
    return z - std::log(2.0) + std::log1p(std::exp(-2.0 * z));
}

}  // namespace

LocalFields local_fields(const CouplingMatrix& A, const SpinConfig& x) {
    check_dims(A, x);
    LocalFields f;
    f.m.assign(A.n(), 0.0);
    for (const auto& e : A.entries()) {
        f.m[e.i] += e.w * x[e.j];
        f.m[e.j] += e.w * x[e.i];
    }
    f.mean = std::accumulate(f.m.begin(), f.m.end(), 0.0) / A.n();
    return f;
}

double conditional_prob(const IsingParams& p, double m_i) {
    const double a = 2.0 * (p.beta * m_i + p.b_field);
    if (a >= 0) return 1.0 / (1.0 + std::exp(-a));
    const double e = std::exp(a);
    return e / (1.0 + e);
}

double hamiltonian(const CouplingMatrix& A, const IsingParams& p, const SpinConfig& x) {
    check_dims(A, x);
    double quad = 0;
    for (const auto& e : A.entries()) quad += e.w * x[e.i] * x[e.j];
    double lin = 0;
    for (int s : x) lin += s;
    return p.beta * quad + p.b_field * lin;  // (beta/2) x'Ax = beta * sum_{i<j}
}

std::vector<double> b_field_vector(const CouplingMatrix& A, const IsingParams& p,
                                   const SpinConfig& x) {
    LocalFields f = local_fields(A, x);
    std::vector<double> b(f.m.size());
    for (std::size_t i = 0; i < b.size(); ++i)
        b[i] = std::tanh(p.beta * f.m[i] + p.b_field);
    return b;
}

GlauberChain::GlauberChain(const CouplingMatrix& A, IsingParams p, Rng rng,
                           SpinInit init, const SpinConfig* given, bool random_scan)
    : A_(A), p_(p), rng_(rng), random_scan_(random_scan) {
    const int n = A.n();
    switch (init) {
        case SpinInit::Random:
            x_.resize(n);
            for (int& s : x_) s = rng_.coin() ? 1 : -1;
            break;
        case SpinInit::AllPlus:
            x_.assign(n, 1);
            break;
        case SpinInit::Given:
            if (!given) throw ConfigError("glauber: missing initial configuration");
            check_dims(A, *given);
            for (int s : *given)
                if (s != 1 && s != -1) throw ConfigError("glauber: spins must be +-1");
            x_ = *given;
            break;
    }
    m_ = local_fields(A_, x_).m;
}

void GlauberChain::update_site(int i) {
    const double u = rng_.uniform();
    const int s = (u < conditional_prob(p_, m_[i])) ? 1 : -1;
    if (s != x_[i]) {
        const double delta = 2.0 * s;  // s - old = 2s since old = -s
        for (const auto& nb : A_.neighbors(i)) m_[nb.j] += nb.w * delta;
        x_[i] = s;
    }
}

void GlauberChain::sweep() {
    const int n = A_.n();
    if (random_scan_) {
        for (int k = 0; k < n; ++k) update_site(static_cast<int>(rng_.below(n)));
    } else {
        for (int i = 0; i < n; ++i) update_site(i);
    }
}

void GlauberChain::run(int sweeps) {
    for (int s = 0; s < sweeps; ++s) sweep();
}

SpinConfig glauber_sample(const CouplingMatrix& A, const IsingParams& p, int sweeps,
                          SpinInit init, std::uint64_t seed, const SpinConfig* given) {
    if (sweeps < 1) throw ConfigError("glauber_sample: sweeps must be >= 1");
    GlauberChain chain(A, p, Rng(seed), init, given);
    chain.run(sweeps);
    return chain.state();
}

ExactTable exact_distribution(const CouplingMatrix& A, const IsingParams& p) {
    const int n = A.n();
    if (n > 20) throw ConfigError("exact_distribution: n > 20");
    const std::size_t count = std::size_t{1} << n;

    // Gray-code walk: flip one spin per step, update f incrementally.
    std::vector<double> logw(count);
    SpinConfig x(n, -1);
    LocalFields lf = local_fields(A, x);
    std::vector<double> m = lf.m;
    double quad = 0;
    for (const auto& e : A.entries()) quad += e.w * x[e.i] * x[e.j];
    double lin = -n;
    double f = p.beta * quad + p.b_field * lin;

    std::size_t gray = 0;
    logw[0] = f;
    for (std::size_t k = 1; k < count; ++k) {
        const int bit = std::countr_zero(k);
        // flipping spin `bit`: delta f = -2 x_bit (beta m_bit + B)
        f += -2.0 * x[bit] * (p.beta * m[bit] + p.b_field);
        const double delta = -2.0 * x[bit];
        for (const auto& nb : A.neighbors(bit)) m[nb.j] += nb.w * delta;
        x[bit] = -x[bit];
        gray ^= std::size_t{1} << bit;
        logw[gray] = f;
    }

    const double fmax = *std::max_element(logw.begin(), logw.end());
    double z = 0;
    for (double lw : logw) z += std::exp(lw - fmax);
    ExactTable table;
    table.n = n;
    table.log_z = fmax + std::log(z);
    table.probs.resize(count);
    for (std::size_t k = 0; k < count; ++k)
        table.probs[k] = std::exp(logw[k] - table.log_z);
    return table;
}

SpinConfig cw_exact_sample(int n, const IsingParams& p, std::uint64_t seed) {
    if (p.beta <= 0) throw ConfigError("cw_exact_sample: beta must be positive");
    if (n < 1) throw ConfigError("cw_exact_sample: n must be >= 1");
    Rng rng(seed);

    // Exact marginal of the plus-spin count k.  With A(i,j) = 1/(n-1) and
    // s = 2k - n: x'Ax = (s^2 - n)/(n-1), so
    // log w_k = log C(n,k) + (beta/2)(s^2-n)/(n-1) + B s.
    std::vector<double> logw(n + 1);
    for (int k = 0; k <= n; ++k) {
        const double s = 2.0 * k - n;
        const double lchoose = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                               std::lgamma(n - k + 1.0);
        const double denom = (n > 1) ? (n - 1.0) : 1.0;
        logw[k] = lchoose + 0.5 * p.beta * (s * s - n) / denom + p.b_field * s;
    }
    const double lmax = *std::max_element(logw.begin(), logw.end());
    double total = 0;
    for (double& lw : logw) {
        lw = std::exp(lw - lmax);
        total += lw;
    }
    double u = rng.uniform() * total;
    int k = 0;
    for (; k < n; ++k) {
        if (u < logw[k]) break;
        u -= logw[k];
    }

    SpinConfig x(n, -1);
    // choose k positions for the plus spins uniformly at random
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (int t = 0; t < k; ++t) {
        std::size_t r = t + rng.below(n - t);
        std::swap(idx[t], idx[r]);
        x[idx[t]] = 1;
    }
    return x;
}

std::string spins_to_string(const SpinConfig& x) {
    std::ostringstream os;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i) os << ' ';
        os << x[i];
    }
    return os.str();
}

SpinConfig spins_from_string(const std::string& line) {
    std::istringstream is(line);
    SpinConfig x;
    int v;
    while (is >> v) {
        if (v != 1 && v != -1) throw ConfigError("spins: values must be +1 or -1");
        x.push_back(v);
    }
    if (x.empty()) throw ConfigError("spins: empty configuration");
    return x;
}

SpinConfig load_spins_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open " + path);
    std::string line;
    while (std::getline(is, line)) {
        auto pos = line.find('#');
        if (pos != std::string::npos) line.erase(pos);
        if (line.find_first_not_of(" \t\r") != std::string::npos)
            return spins_from_string(line);
    }
    throw ConfigError("spins: no data in " + path);
}

void save_spins_file(const std::string& path, const SpinConfig& x) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open " + path + " for writing");
    os << spins_to_string(x) << '\n';
}

}  // namespace ising
