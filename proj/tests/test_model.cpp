#include <bit>
#include <cmath>
#include <map>

#include "doctest.h"
#include "isingpl/errors.hpp"
#include "isingpl/graph.hpp"
#include "isingpl/model.hpp"
#include "oracles.hpp"
#include "stats.hpp"

using namespace ising;

namespace {

CouplingMatrix scaled_triangle() {
    return CouplingMatrix::scaled_adjacency(complete_graph(3));  // weights 1/2
}

std::size_t spin_index(const SpinConfig& x) {
    std::size_t k = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] == 1) k |= std::size_t{1} << i;
    return k;
}

}  // namespace

TEST_CASE("local fields: all-ones gives the row sums; hand examples") {
    CouplingMatrix path = CouplingMatrix::scaled_adjacency(make_graph(3, {{0, 1}, {1, 2}}));
    SpinConfig ones{1, 1, 1};
    LocalFields f = local_fields(path, ones);
    CHECK(f.m[0] == doctest::Approx(0.75));
    CHECK(f.m[1] == doctest::Approx(1.5));
    CHECK(f.m[2] == doctest::Approx(0.75));
    for (int i = 0; i < 3; ++i) CHECK(f.m[i] == doctest::Approx(path.row_sums()[i]));

    CouplingMatrix edge = CouplingMatrix::scaled_adjacency(make_graph(2, {{0, 1}}));
    LocalFields fe = local_fields(edge, {1, -1});
    CHECK(fe.m[0] == doctest::Approx(-1.0));
    CHECK(fe.m[1] == doctest::Approx(1.0));

    CHECK_THROWS_AS(local_fields(path, {1, 1}), DimensionMismatch);
}

TEST_CASE("conditional_prob: symmetry, value, saturation, monotonicity") {
    CHECK(conditional_prob({1.0, -1.0}, 1.0) == doctest::Approx(0.5));
    const double e = std::exp(1.0);
    CHECK(conditional_prob({1.0, 0.0}, 1.0) ==
          doctest::Approx(e / (e + 1.0 / e)).epsilon(1e-9));
    const double sat = conditional_prob({1.0, 0.0}, 50.0);
    CHECK(sat >= 1.0 - 1e-15);
    CHECK(sat <= 1.0);
    CHECK(conditional_prob({1.0, 0.0}, -50.0) < 1e-20);

    double prev = 0;
    for (double a = -15; a <= 15; a += 0.25) {
        const double p = conditional_prob({1.0, a}, 0.0);
        CHECK(p > prev);
        CHECK(p > 0);
        CHECK(p < 1);
        prev = p;
    }
}

TEST_CASE("hamiltonian: field-only, triangle, zero params") {
    CouplingMatrix tri = scaled_triangle();
    CHECK(hamiltonian(tri, {0.0, 1.0}, {1, 1, -1}) == doctest::Approx(1.0));  // 2k-n
    CHECK(hamiltonian(tri, {1.0, 0.0}, {1, 1, 1}) == doctest::Approx(1.5));
    CHECK(hamiltonian(tri, {0.0, 0.0}, {1, -1, 1}) == doctest::Approx(0.0));
}

TEST_CASE("hamiltonian flip identity: f(x) - f(x with i flipped) = 2 x_i (beta m_i + B)") {
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        CouplingMatrix A = oracle::random_coupling(8, rng);
        SpinConfig x = oracle::random_spins(8, rng);
        IsingParams p{0.3 + rng.uniform(), rng.uniform() - 0.5};
        LocalFields f = local_fields(A, x);
        const int i = static_cast<int>(rng.below(8));
        SpinConfig y = x;
        y[i] = -y[i];
        const double diff = hamiltonian(A, p, x) - hamiltonian(A, p, y);
        CHECK(diff == doctest::Approx(2.0 * x[i] * (p.beta * f.m[i] + p.b_field))
                          .epsilon(1e-10));
    }
}

TEST_CASE("b_field_vector: zero params, tanh bound, regular graph constant") {
    CouplingMatrix tri = scaled_triangle();
    for (double b : b_field_vector(tri, {0.0, 0.0}, {1, -1, 1}))
        CHECK(b == doctest::Approx(0.0));

    CouplingMatrix reg = CouplingMatrix::scaled_adjacency(gen_regular(20, 4, 3));
    IsingParams p{0.8, 0.2};
    auto b = b_field_vector(reg, p, SpinConfig(20, 1));
    const double bound = std::tanh(p.beta * reg.gamma() + std::fabs(p.b_field));
    for (double bi : b) {
        CHECK(bi == doctest::Approx(std::tanh(1.0)).epsilon(1e-12));
        CHECK(std::fabs(bi) <= bound + 1e-15);
    }
}

TEST_CASE("exact_distribution: single site, triangle aligned state, uniform at (0,0)") {
    CouplingMatrix single(1, {});
    IsingParams p{0.7, 0.4};
    ExactTable t1 = exact_distribution(single, p);
    const double expect = std::exp(0.4) / (std::exp(0.4) + std::exp(-0.4));
    CHECK(t1.probs[1] == doctest::Approx(expect).epsilon(1e-12));

    ExactTable tri = exact_distribution(scaled_triangle(), {1.0, 0.0});
    const double p_all = std::exp(1.5) / (2 * std::exp(1.5) + 6 * std::exp(-0.5));
    CHECK(tri.probs[7] == doctest::Approx(p_all).epsilon(1e-12));
    CHECK(p_all == doctest::Approx(0.355617).epsilon(1e-5));

    ExactTable u = exact_distribution(scaled_triangle(), {0.0, 0.0});
    for (double q : u.probs) CHECK(q == doctest::Approx(1.0 / 8).epsilon(1e-12));

    double total = 0;
    for (double q : tri.probs) total += q;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(exact_distribution(CouplingMatrix(21, {}), p), ConfigError);
}

TEST_CASE("exact_distribution: spin-flip symmetry at B = 0") {
    Rng rng(5);
    CouplingMatrix A = oracle::random_coupling(6, rng);
    ExactTable t = exact_distribution(A, {0.9, 0.0});
    const std::size_t mask = (1u << 6) - 1;
    for (std::size_t k = 0; k < t.probs.size(); ++k)
        CHECK(t.probs[k] == doctest::Approx(t.probs[~k & mask]).epsilon(1e-10));
}

TEST_CASE("glauber at beta=0 gives i.i.d. spins with P(+) = sigmoid(2B)") {
    CouplingMatrix A = CouplingMatrix::scaled_adjacency(gen_regular(50, 4, 2));
    IsingParams p{0.0, 0.7};
    const double target = 1.0 / (1.0 + std::exp(-2 * 0.7));
    int plus = 0, total = 0;
    for (int rep = 0; rep < 400; ++rep) {
        SpinConfig x = glauber_sample(A, p, 1, SpinInit::AllPlus, 1000 + rep);
        for (int s : x) {
            plus += (s == 1);
            ++total;
        }
    }
    const double phat = static_cast<double>(plus) / total;
    const double se = std::sqrt(target * (1 - target) / total);
    CHECK(std::fabs(phat - target) < 4 * se);
}

TEST_CASE("glauber long-run frequencies match the enumeration oracle (n=4)") {
    Rng rng(77);
    CouplingMatrix A = oracle::random_coupling(4, rng);
    IsingParams p{0.8, 0.3};
    ExactTable exact = exact_distribution(A, p);

    const int samples = 40000;
    std::vector<int> counts(16, 0);
    GlauberChain chain(A, p, Rng(99), SpinInit::Random);
    chain.run(200);
    for (int s = 0; s < samples; ++s) {
        chain.run(3);
        ++counts[spin_index(chain.state())];
    }
    for (std::size_t k = 0; k < 16; ++k) {
        const double expect = samples * exact.probs[k];
        const double se = std::sqrt(samples * exact.probs[k] * (1 - exact.probs[k]));
        if (expect >= 5) CHECK(std::fabs(counts[k] - expect) < 4.5 * se);
    }
}

TEST_CASE("glauber incremental fields agree with recomputation after many updates") {
    Rng rng(13);
    CouplingMatrix A = oracle::random_coupling(30, rng, 0.3);
    GlauberChain chain(A, {0.7, 0.1}, Rng(8), SpinInit::Random);
    chain.run(3500);  // > 1e5 site updates
    LocalFields fresh = local_fields(A, chain.state());
    for (std::size_t i = 0; i < fresh.m.size(); ++i)
        CHECK(std::fabs(chain.fields()[i] - fresh.m[i]) < 1e-10);
}

TEST_CASE("glauber is deterministic given the seed") {
    CouplingMatrix A = CouplingMatrix::scaled_adjacency(gen_regular(30, 4, 6));
    IsingParams p{0.9, 0.1};
    CHECK(glauber_sample(A, p, 50, SpinInit::Random, 42) ==
          glauber_sample(A, p, 50, SpinInit::Random, 42));
}

TEST_CASE("cw_exact_sample: magnetization marginal matches enumeration (n=10)") {
    const int n = 10;
    IsingParams p{0.5, 0.2};
    CouplingMatrix cw = CouplingMatrix::scaled_adjacency(complete_graph(n));
    ExactTable exact = exact_distribution(cw, p);

    // exact magnetization-count marginal
    std::vector<double> marginal(n + 1, 0.0);
    for (std::size_t k = 0; k < exact.probs.size(); ++k)
        marginal[std::popcount(k)] += exact.probs[k];

    const int draws = 50000;
    std::vector<int> counts(n + 1, 0);
    for (int d = 0; d < draws; ++d) {
        const SpinConfig x = cw_exact_sample(n, p, 5000 + d);
        int k = 0;
        for (int s : x) k += (s == 1);
        ++counts[k];
    }
    double chi2 = 0;
    int dof = -1;
    double small_obs = 0, small_exp = 0;
    for (int k = 0; k <= n; ++k) {
        const double expect = draws * marginal[k];
        if (expect < 5) {
            small_obs += counts[k];
            small_exp += expect;
            continue;
        }
        chi2 += (counts[k] - expect) * (counts[k] - expect) / expect;
        ++dof;
    }
    if (small_exp > 0) {
        chi2 += (small_obs - small_exp) * (small_obs - small_exp) / small_exp;
        ++dof;
    }
    CHECK(teststats::chi2_pvalue(chi2, dof) > 1e-3);
}

TEST_CASE("cw_exact_sample: B=0 gives symmetric counts; beta->0 approaches binomial") {
    const int n = 3, draws = 30000;
    int k3 = 0, k0 = 0;
    for (int d = 0; d < draws; ++d) {
        const SpinConfig x = cw_exact_sample(n, {1.0, 0.0}, 100 + d);
        int k = 0;
        for (int s : x) k += (s == 1);
        k3 += (k == 3);
        k0 += (k == 0);
    }
    const double se = std::sqrt(static_cast<double>(k3 + k0));
    CHECK(std::fabs(k3 - k0) < 5 * se);

    // beta = epsilon: plus-count mean approaches n * sigmoid(2B)
    const int n2 = 20, draws2 = 20000;
    double mean_k = 0;
    for (int d = 0; d < draws2; ++d) {
        const SpinConfig x = cw_exact_sample(n2, {1e-9, 0.4}, 777 + d);
        for (int s : x) mean_k += (s == 1);
    }
    mean_k /= draws2;
    const double target = n2 / (1.0 + std::exp(-0.8));
    CHECK(std::fabs(mean_k - target) < 0.1);

    CHECK_THROWS_AS(cw_exact_sample(5, {-1.0, 0.1}, 1), ConfigError);
}

TEST_CASE("spin file round-trip and validation") {
    SpinConfig x{1, -1, -1, 1};
    CHECK(spins_from_string(spins_to_string(x)) == x);
    CHECK_THROWS_AS(spins_from_string("1 0 -1"), ConfigError);
}
