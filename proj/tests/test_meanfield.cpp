#include <cmath>
#include <numeric>

#include "doctest.h"
#include "isingpl/graph.hpp"
#include "isingpl/meanfield.hpp"
#include "isingpl/rng.hpp"
#include "oracles.hpp"

using namespace ising;

TEST_CASE("entropy: value at 0, limits, symmetry") {
    CHECK(entropy(0.0) == doctest::Approx(-std::log(2.0)).epsilon(1e-14));
    CHECK(entropy(1.0) == doctest::Approx(0.0));
    CHECK(entropy(-1.0) == doctest::Approx(0.0));
    for (double y = -0.95; y <= 0.95; y += 0.05)
        CHECK(entropy(y) == doctest::Approx(entropy(-y)).epsilon(1e-13));
}

TEST_CASE("magnetization_root: beta=0, subcritical B=0, curve fixed point") {
    ScalarVariational r1 = magnetization_root(0.0, 1.0, std::atanh(0.3));
    CHECK(r1.m0 == doctest::Approx(0.3).epsilon(1e-11));

    ScalarVariational r2 = magnetization_root(0.9, 1.0, 0.0);
    CHECK(std::fabs(r2.m0) < 1e-9);

    // on the curve B = atanh(0.3) - 0.3*beta with beta*theta < 1
    ScalarVariational r3 = magnetization_root(0.8, 1.0, std::atanh(0.3) - 0.3 * 0.8);
    CHECK(r3.m0 == doctest::Approx(0.3).epsilon(1e-10));

    // stationarity residual
    for (const auto& r : {r1, r2, r3}) {
        const double resid = r.beta * r.theta * r.m0 + r.b_field - std::atanh(r.m0);
        CHECK(std::fabs(resid) <= 1e-12);
    }
}

TEST_CASE("magnetization_root: supercritical tilt follows the sign of B") {
    ScalarVariational plus = magnetization_root(2.0, 1.0, 0.05);
    ScalarVariational minus = magnetization_root(2.0, 1.0, -0.05);
    CHECK(plus.m0 > 0.5);
    CHECK(minus.m0 < -0.5);
    CHECK(plus.m0 == doctest::Approx(-minus.m0).epsilon(1e-9));
}

TEST_CASE("magnetization_root agrees with a brute grid argmax of phi") {
    Rng rng(55);
    for (int trial = 0; trial < 500; ++trial) {
        const double beta = 3.0 * rng.uniform();
        const double theta = 0.5 + 1.5 * rng.uniform();
        const double b = 4.0 * rng.uniform() - 2.0;
        ScalarVariational r = magnetization_root(beta, theta, b);

        const int grid = 100000;
        double best = -1e300, best_m = 0;
        for (int k = 0; k <= grid; ++k) {
            const double m = -1.0 + 1e-9 + (2.0 - 2e-9) * k / grid;
            const double v = phi(beta, theta, b, m);
            if (v > best) {
                best = v;
                best_m = m;
            }
        }
        CHECK(std::fabs(r.m0 - best_m) < 2.5e-5);  // grid resolution
        CHECK(r.phi_at_m0 >= best - 1e-12);

        // second-order condition at the maximizer
        const double phi2 = beta * theta - 1.0 / (1.0 - r.m0 * r.m0);
        CHECK(phi2 < 0);
    }
}

TEST_CASE("param_curve: values at beta 0 and 1, zero m, fixed-point residual") {
    auto pts = param_curve(0.3, {0.0, 1.0});
    CHECK(pts[0].b_field == doctest::Approx(0.309520).epsilon(1e-5));
    CHECK(pts[1].b_field == doctest::Approx(0.009520).epsilon(1e-4));
    for (const auto& p : param_curve(0.0, {0.1, 0.9, 2.0}))
        CHECK(p.b_field == doctest::Approx(0.0));

    Rng rng(66);
    for (int k = 0; k < 1000; ++k) {
        const double m = 1.8 * rng.uniform() - 0.9;
        const double beta = 3.0 * rng.uniform();
        auto pp = param_curve(m, {beta});
        CHECK(std::fabs(std::tanh(pp[0].beta * m + pp[0].b_field) - m) <= 1e-14);
    }
}

TEST_CASE("regularity_residual: beta=0 exact zero, regular-graph closed form, relabeling") {
    Rng rng(77);
    CouplingMatrix A = oracle::random_coupling(20, rng, 0.4);
    SpinConfig x = oracle::random_spins(20, rng);
    CHECK(regularity_residual(A, {0.0, 0.6}, x) == doctest::Approx(0.0).epsilon(1e-13));

    // d-regular scaled graph, x = all-ones: constant field closed form
    CouplingMatrix reg = CouplingMatrix::scaled_adjacency(gen_regular(24, 4, 3));
    IsingParams p{0.7, 0.2};
    const double b = std::tanh(p.beta + p.b_field);
    const double expect = std::fabs(p.beta * b + p.b_field - std::atanh(b));
    CHECK(regularity_residual(reg, p, SpinConfig(24, 1)) ==
          doctest::Approx(expect).epsilon(1e-10));

    // invariance under vertex relabeling
    std::vector<int> perm(20);
    std::iota(perm.begin(), perm.end(), 0);
    for (int k = 19; k > 0; --k) std::swap(perm[k], perm[rng.below(k + 1)]);
    std::vector<CouplingMatrix::Entry> entries2;
    for (const auto& e : A.entries()) entries2.push_back({perm[e.i], perm[e.j], e.w});
    CouplingMatrix A2(20, entries2);
    SpinConfig x2(20);
    for (int i = 0; i < 20; ++i) x2[perm[i]] = x[i];
    CHECK(regularity_residual(A, p, x) ==
          doctest::Approx(regularity_residual(A2, p, x2)).epsilon(1e-12));
}
