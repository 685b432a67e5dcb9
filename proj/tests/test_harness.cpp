#include <cmath>
#include <cstdlib>
#include <sstream>

#include "doctest.h"
#include "isingpl/errors.hpp"
#include "isingpl/harness.hpp"

using namespace ising;

namespace {

ExperimentSpec tiny_figure2() {
    ExperimentSpec s = default_spec("figure2");
    s.n_values = {60};
    s.curve_points = 4;
    s.replicates = 2;
    s.sampler.burn_in = 50;
    s.seed = 42;
    return s;
}

}  // namespace

TEST_CASE("figure2: record count equals the Cartesian product size") {
    ExperimentSpec s = tiny_figure2();
    auto recs = run_figure2(s);
    CHECK(recs.size() == 1u * 2 * 4 * 2);  // n-values x degrees x points x reps
    for (const auto& r : recs) {
        CHECK(r.experiment == "figure2");
        CHECK((r.family == "d=4" || r.family == "d=50"));
        // failures are records, not omissions
        CHECK((r.exists || r.fail_set != "-"));
    }
}

TEST_CASE("experiments rerun with the same seed are byte-identical") {
    ExperimentSpec s = tiny_figure2();
    const std::string a = records_to_csv(run_figure2(s));
    const std::string b = records_to_csv(run_figure2(s));
    CHECK(a == b);

    ExperimentSpec r = default_spec("rates");
    r.n_values = {40};
    r.replicates = 3;
    r.sampler.burn_in = 30;
    r.seed = 7;
    CHECK(records_to_csv(run_rates(r)) == records_to_csv(run_rates(r)));

    ExperimentSpec ident = default_spec("identifiability");
    ident.n_values = {40};
    ident.replicates = 3;
    ident.sampler.burn_in = 30;
    ident.seed = 9;
    CHECK(records_to_csv(run_identifiability(ident)) ==
          records_to_csv(run_identifiability(ident)));
}

TEST_CASE("determinism does not depend on the worker count") {
#ifdef _WIN32
    return;
#else
    ExperimentSpec s = tiny_figure2();
    setenv("ISING_PLFIT_THREADS", "1", 1);
    const std::string serial = records_to_csv(run_figure2(s));
    setenv("ISING_PLFIT_THREADS", "4", 1);
    const std::string parallel = records_to_csv(run_figure2(s));
    unsetenv("ISING_PLFIT_THREADS");
    CHECK(serial == parallel);
#endif
}

TEST_CASE("rates: joint plus two univariate records per replicate") {
    ExperimentSpec r = default_spec("rates");
    r.n_values = {40};
    r.replicates = 2;
    r.sampler.burn_in = 30;
    r.seed = 3;
    auto recs = run_rates(r);
    CHECK(recs.size() == 6);
    CHECK(recs[0].family == "d=4");
    CHECK(recs[1].family == "d=4|beta_known");
    CHECK(recs[2].family == "d=4|b_known");
    // the known parameter is echoed back
    if (recs[1].exists) CHECK(recs[1].b_hat == doctest::Approx(recs[1].b_true));
    if (recs[2].exists) CHECK(recs[2].beta_hat == doctest::Approx(recs[2].beta_true));
}

TEST_CASE("curve_error: on-line displacement is pure along-error") {
    const double m = 0.3;
    // moving along the line (direction (1, -m)) from the true point
    CurveError e = curve_error(m, 0.5, 0.2, 0.5 + 1.0, 0.2 - m);
    CHECK(e.cross == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(e.along == doctest::Approx(std::sqrt(1 + m * m)).epsilon(1e-12));
    CHECK(e.l2 == doctest::Approx(std::sqrt(1 + m * m)).epsilon(1e-12));

    // moving orthogonally
    CurveError o = curve_error(m, 0.5, 0.2, 0.5 + m / std::sqrt(1 + m * m),
                               0.2 + 1 / std::sqrt(1 + m * m));
    CHECK(o.along == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(o.cross == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("spec JSON parsing: fields, defaults and validation") {
    const std::string text = R"({
        "name": "rates",
        "graph": {"family": "er", "p": 0.25},
        "n_values": [50, 100],
        "param_points": [[0.6, 0.25]],
        "m": 0.3,
        "replicates": 5,
        "sampler": {"burn_in": 100, "spacing": 10, "init": "all-plus"},
        "seed": 99
    })";
    ExperimentSpec s = spec_from_json(text);
    CHECK(s.graph.family == "er");
    CHECK(s.graph.p == doctest::Approx(0.25));
    CHECK(s.n_values == std::vector<int>{50, 100});
    CHECK(s.param_points.size() == 1);
    CHECK(s.param_points[0].beta == doctest::Approx(0.6));
    CHECK(s.replicates == 5);
    CHECK(s.sampler.burn_in == 100);
    CHECK(s.sampler.init == SpinInit::AllPlus);
    CHECK(s.seed == 99);

    CHECK_THROWS_AS(spec_from_json("{not json"), ConfigError);
    CHECK_THROWS_AS(spec_from_json(R"({"name":"rates","replicates":0})"), ConfigError);
    CHECK_THROWS_AS(spec_from_json(R"({"name":"rates","n_values":[1]})"), ConfigError);
}

TEST_CASE("CSV header matches the interface contract") {
    CHECK(std::string(kCsvHeader) ==
          "experiment,n,d_or_family,graph_seed,rep_seed,beta_true,B_true,beta_hat,"
          "B_hat,exists,fail_set,err_l2,err_along,err_cross,t_stat,rate_bound");
    auto recs = run_figure2(tiny_figure2());
    std::istringstream csv(records_to_csv(recs));
    std::string header;
    std::getline(csv, header);
    CHECK(header == kCsvHeader);
    std::string line;
    std::size_t rows = 0;
    while (std::getline(csv, line)) ++rows;
    CHECK(rows == recs.size());
}
