#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "isingpl/model.hpp"
#include "isingpl/pseudolikelihood.hpp"

namespace ising {

struct SamplerConfig {
    int burn_in = 2000;
    int spacing = 50;
    SpinInit init = SpinInit::Random;
};

// Graph family used by an experiment.  For "biregular", the left part has
// round(p*n) vertices and the right-side degree grows like round(sqrt(n))
// (adjusted so the stub counts match).
struct GraphSpec {
    std::string family = "regular";  // regular | er | biregular | complete
    int d = 4;                       // regular degree
    double p = 0.5;                  // er probability / bipartite left fraction
};

struct ExperimentSpec {
    std::string name = "custom";     // figure2 | rates | identifiability | custom
    GraphSpec graph;
    std::vector<int> n_values;
    std::vector<IsingParams> param_points;  // empty => built from the m-curve
    double m_target = 0.3;
    double beta_min = 0.2, beta_max = 1.5;
    int curve_points = 30;
    int replicates = 1;
    SamplerConfig sampler;
    std::uint64_t seed = 0;
};

struct ExperimentRecord {
    std::string experiment;
    int n = 0;
    std::string family;        // d_or_family column
    std::uint64_t graph_seed = 0, rep_seed = 0;
    double beta_true = 0, b_true = 0;
    double beta_hat = 0, b_hat = 0;  // NaN on failure
    bool exists = false;
    std::string fail_set = "-";
    double err_l2 = 0, err_along = 0, err_cross = 0;
    double t_stat = 0, rate_bound = 0;
    double wall_ms = 0;  // excluded from CSV
};

// Decomposition of the estimation error relative to the line
// B = atanh(m) - m*beta (the fixed-point curve of m = tanh(beta m + B)).
struct CurveError {
    double l2 = 0, along = 0, cross = 0;
};
CurveError curve_error(double m, double beta_true, double b_true,
                       double beta_hat, double b_hat);

// Figure-2 style sweep: for each n and each d in {4, 50}, one graph, 30
// points on the m=0.3 curve, `replicates` samples and joint fits per point.
std::vector<ExperimentRecord> run_figure2(const ExperimentSpec& spec);

// Rate scaling for one graph family: per (n, replicate) a fresh graph and
// sample at param_points[0]; emits joint fits plus univariate fits recorded
// with family suffixes "|beta_known" and "|b_known".
std::vector<ExperimentRecord> run_rates(const ExperimentSpec& spec);

// T_n collapse / persistence and along-curve smearing for one family.
std::vector<ExperimentRecord> run_identifiability(const ExperimentSpec& spec);

std::vector<ExperimentRecord> run_experiment(const ExperimentSpec& spec);

ExperimentSpec default_spec(const std::string& name);
ExperimentSpec spec_from_json(const std::string& json_text);

extern const char* kCsvHeader;
std::string records_to_csv(const std::vector<ExperimentRecord>& records);

// Worker count: ISING_PLFIT_THREADS caps it; absent means hardware default.
int worker_count();

}  // namespace ising
