#include "isingpl/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

#include "isingpl/errors.hpp"
#include "isingpl/graph.hpp"
#include "isingpl/meanfield.hpp"
#include "vendor_json.hpp"

namespace ising {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = Rng::mix(seed + 0x9e3779b97f4a7c15ULL);
    for (std::uint64_t v : path) s = Rng::mix(s ^ Rng::mix(v + 0xd1b54a32d192ed03ULL));
    return s;
}

std::vector<double> linspace(double lo, double hi, int count) {
    std::vector<double> v(count);
    for (int i = 0; i < count; ++i)
        v[i] = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
    return v;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    const int workers = std::min<std::size_t>(worker_count(), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                body(i);
            }
        });
    for (auto& t : pool) t.join();
}

std::string family_label(const GraphSpec& g) {
    char buf[64];
    if (g.family == "regular") {
        std::snprintf(buf, sizeof buf, "d=%d", g.d);
    } else if (g.family == "er") {
        std::snprintf(buf, sizeof buf, "er_p=%g", g.p);
    } else if (g.family == "biregular") {
        std::snprintf(buf, sizeof buf, "bip_p=%g", g.p);
    } else {
        std::snprintf(buf, sizeof buf, "%s", g.family.c_str());
    }
    return buf;
}

Graph make_family_graph(const GraphSpec& g, int n, std::uint64_t seed) {
    if (g.family == "regular") return gen_regular(n, g.d, seed);
    if (g.family == "er") return gen_er(n, g.p, seed);
    if (g.family == "complete") return complete_graph(n);
    if (g.family == "biregular") {
        const int a = std::max(1, static_cast<int>(std::llround(g.p * n)));
        const int b = n - a;
        if (b <= 0) throw ConfigError("biregular: left fraction too large");
        // right-side degree grows like sqrt(n); bump until the stub counts match
        int d = std::max(2, static_cast<int>(std::llround(std::sqrt(n))));
        for (; d <= a; ++d) {
            const long long stubs = static_cast<long long>(b) * d;
            if (stubs % a == 0 && stubs / a <= b) break;
        }
        if (d > a) throw ConfigError("biregular: no feasible degree for n=" +
                                     std::to_string(n));
        const int c = static_cast<int>(static_cast<long long>(b) * d / a);
        return gen_biregular(a, b, c, d, seed);
    }
    throw ConfigError("unknown graph family: " + g.family);
}

// Fills estimates / failure code into a record for one (sample, fit) task.
void fit_into_record(const CouplingMatrix& A, const SpinConfig& x, double m_curve,
                     ExperimentRecord& rec) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
        FitResult fr = fit_joint(A, x);
        rec.t_stat = fr.t_stat;
        rec.rate_bound = fr.rate_bound;
        if (fr.verdict.exists) {
            rec.exists = true;
            rec.beta_hat = fr.beta_hat;
            rec.b_hat = fr.b_hat;
            const CurveError e =
                curve_error(m_curve, rec.beta_true, rec.b_true, fr.beta_hat, fr.b_hat);
            rec.err_l2 = e.l2;
            rec.err_along = e.along;
            rec.err_cross = e.cross;
        } else {
            rec.exists = false;
            rec.beta_hat = rec.b_hat = kNaN;
            rec.err_l2 = rec.err_along = rec.err_cross = kNaN;
            std::string fs;
            for (const auto& s : fr.verdict.failing_sets()) {
                if (!fs.empty()) fs += '|';
                fs += s;
            }
            rec.fail_set = fs;
        }
    } catch (const NumericError&) {
        rec.exists = false;
        rec.beta_hat = rec.b_hat = kNaN;
        rec.err_l2 = rec.err_along = rec.err_cross = kNaN;
        rec.fail_set = "NonConvergence";
    }
    rec.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
}

}  // namespace

int worker_count() {
    if (const char* env = std::getenv("ISING_PLFIT_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

CurveError curve_error(double m, double beta_true, double b_true, double beta_hat,
                       double b_hat) {
    CurveError e;
    const double dbeta = beta_hat - beta_true, db = b_hat - b_true;
    e.l2 = std::hypot(dbeta, db);
    // The curve B = atanh(m) - m*beta is a line with direction (1, -m).
    const double norm = std::sqrt(1.0 + m * m);
    e.along = std::fabs((dbeta - m * db) / norm);
    e.cross = std::fabs((m * dbeta + db) / norm);
    return e;
}

std::vector<ExperimentRecord> run_figure2(const ExperimentSpec& spec) {
    const std::vector<int> degrees = {4, 50};
    const std::vector<double> betas =
        linspace(spec.beta_min, spec.beta_max, spec.curve_points);
    const std::vector<IsingParams> points =
        spec.param_points.empty() ? param_curve(spec.m_target, betas)
                                  : spec.param_points;

    struct Task {
        int n, d, point, rep;
        std::uint64_t graph_seed;
    };
    std::vector<Task> tasks;
    std::vector<std::pair<std::uint64_t, CouplingMatrix>> couplings;  // (seed, A)
    std::vector<int> coupling_of_task;
    for (int n : spec.n_values) {
        for (int d : degrees) {
            const std::uint64_t gseed = derive_seed(spec.seed, {1, (std::uint64_t)n,
                                                                (std::uint64_t)d});
            couplings.emplace_back(
                gseed, CouplingMatrix::scaled_adjacency(gen_regular(n, d, gseed)));
            for (int pt = 0; pt < static_cast<int>(points.size()); ++pt)
                for (int rep = 0; rep < spec.replicates; ++rep) {
                    tasks.push_back({n, d, pt, rep, gseed});
                    coupling_of_task.push_back(static_cast<int>(couplings.size()) - 1);
                }
        }
    }

    std::vector<ExperimentRecord> records(tasks.size());
    parallel_for(tasks.size(), [&](std::size_t i) {
        const Task& t = tasks[i];
        const CouplingMatrix& A = couplings[coupling_of_task[i]].second;
        const IsingParams p = points[t.point];
        ExperimentRecord& rec = records[i];
        rec.experiment = "figure2";
        rec.n = t.n;
        rec.family = "d=" + std::to_string(t.d);
        rec.graph_seed = t.graph_seed;
        rec.rep_seed = derive_seed(spec.seed, {2, (std::uint64_t)t.n, (std::uint64_t)t.d,
                                               (std::uint64_t)t.point,
                                               (std::uint64_t)t.rep});
        rec.beta_true = p.beta;
        rec.b_true = p.b_field;
        const SpinConfig x =
            glauber_sample(A, p, spec.sampler.burn_in, spec.sampler.init, rec.rep_seed);
        fit_into_record(A, x, spec.m_target, rec);
    });
    return records;
}

std::vector<ExperimentRecord> run_rates(const ExperimentSpec& spec) {
    const IsingParams p0 = spec.param_points.empty() ? IsingParams{0.5, 0.31}
                                                     : spec.param_points[0];
    struct Task {
        int n, rep;
    };
    std::vector<Task> tasks;
    for (int n : spec.n_values)
        for (int rep = 0; rep < spec.replicates; ++rep) tasks.push_back({n, rep});

    const std::string fam = family_label(spec.graph);
    // 3 records per task: joint, beta-known, B-known
    std::vector<ExperimentRecord> records(tasks.size() * 3);
    parallel_for(tasks.size(), [&](std::size_t i) {
        const Task& t = tasks[i];
        const std::uint64_t gseed =
            derive_seed(spec.seed, {3, (std::uint64_t)t.n, (std::uint64_t)t.rep});
        const std::uint64_t rseed =
            derive_seed(spec.seed, {4, (std::uint64_t)t.n, (std::uint64_t)t.rep});
        const Graph g = make_family_graph(spec.graph, t.n, gseed);
        const CouplingMatrix A = CouplingMatrix::scaled_adjacency(g);
        const SpinConfig x =
            glauber_sample(A, p0, spec.sampler.burn_in, spec.sampler.init, rseed);

        ExperimentRecord base;
        base.experiment = "rates";
        base.n = t.n;
        base.graph_seed = gseed;
        base.rep_seed = rseed;
        base.beta_true = p0.beta;
        base.b_true = p0.b_field;

        ExperimentRecord& joint = records[3 * i];
        joint = base;
        joint.family = fam;
        fit_into_record(A, x, spec.m_target, joint);

        ExperimentRecord& ub = records[3 * i + 1];
        ub = base;
        ub.family = fam + "|beta_known";
        ub.t_stat = joint.t_stat;
        ub.rate_bound = joint.rate_bound;
        try {
            // B known, solve for beta alone
            ub.beta_hat = fit_beta(A, x, p0.b_field);
            ub.b_hat = p0.b_field;
            ub.exists = true;
            ub.err_l2 = std::fabs(ub.beta_hat - p0.beta);
            ub.err_along = ub.err_cross = kNaN;
        } catch (const NumericError& err) {
            ub.beta_hat = ub.b_hat = kNaN;
            ub.err_l2 = ub.err_along = ub.err_cross = kNaN;
            ub.fail_set = "NoRoot";
            (void)err;
        }

        ExperimentRecord& uB = records[3 * i + 2];
        uB = base;
        uB.family = fam + "|b_known";
        uB.t_stat = joint.t_stat;
        uB.rate_bound = joint.rate_bound;
        try {
            uB.b_hat = fit_b(A, x, p0.beta);
            uB.beta_hat = p0.beta;
            uB.exists = true;
            uB.err_l2 = std::fabs(uB.b_hat - p0.b_field);
            uB.err_along = uB.err_cross = kNaN;
        } catch (const NumericError& err) {
            uB.beta_hat = uB.b_hat = kNaN;
            uB.err_l2 = uB.err_along = uB.err_cross = kNaN;
            uB.fail_set = "NoRoot";
            (void)err;
        }
    });
    return records;
}

std::vector<ExperimentRecord> run_identifiability(const ExperimentSpec& spec) {
    IsingParams p0;
    if (spec.param_points.empty()) {
        p0.beta = 0.7;
        p0.b_field = std::atanh(spec.m_target) - spec.m_target * p0.beta;
    } else {
        p0 = spec.param_points[0];
    }
    struct Task {
        int n, rep;
    };
    std::vector<Task> tasks;
    for (int n : spec.n_values)
        for (int rep = 0; rep < spec.replicates; ++rep) tasks.push_back({n, rep});

    const std::string fam = family_label(spec.graph);
    std::vector<ExperimentRecord> records(tasks.size());
    parallel_for(tasks.size(), [&](std::size_t i) {
        const Task& t = tasks[i];
        ExperimentRecord& rec = records[i];
        rec.experiment = "identifiability";
        rec.n = t.n;
        rec.family = fam;
        rec.graph_seed =
            derive_seed(spec.seed, {5, (std::uint64_t)t.n, (std::uint64_t)t.rep});
        rec.rep_seed =
            derive_seed(spec.seed, {6, (std::uint64_t)t.n, (std::uint64_t)t.rep});
        rec.beta_true = p0.beta;
        rec.b_true = p0.b_field;
        const Graph g = make_family_graph(spec.graph, t.n, rec.graph_seed);
        const CouplingMatrix A = CouplingMatrix::scaled_adjacency(g);
        const SpinConfig x =
            glauber_sample(A, p0, spec.sampler.burn_in, spec.sampler.init, rec.rep_seed);
        fit_into_record(A, x, spec.m_target, rec);
    });
    return records;
}

std::vector<ExperimentRecord> run_experiment(const ExperimentSpec& spec) {
    if (spec.name == "figure2") return run_figure2(spec);
    if (spec.name == "rates" || spec.name == "custom") return run_rates(spec);
    if (spec.name == "identifiability") return run_identifiability(spec);
    throw ConfigError("unknown experiment: " + spec.name);
}

ExperimentSpec default_spec(const std::string& name) {
    ExperimentSpec s;
    s.name = name;
    if (name == "figure2") {
        s.n_values = {100, 200};
        s.replicates = 1;
    } else if (name == "rates") {
        s.n_values = {100, 400, 1600};
        s.replicates = 200;
        s.graph = {"regular", 4, 0.5};
        s.param_points = {{0.5, 0.31}};
    } else if (name == "identifiability") {
        s.n_values = {100, 400, 1600};
        s.replicates = 50;
        s.graph = {"er", 4, 0.5};
    } else if (name == "custom") {
        s.n_values = {100};
        s.replicates = 10;
    } else {
        throw ConfigError("unknown experiment: " + name);
    }
    return s;
}

ExperimentSpec spec_from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("spec: invalid JSON: ") + e.what());
    }
    ExperimentSpec s = default_spec(j.value("name", std::string("custom")));
    try {
        if (j.contains("graph")) {
            const auto& g = j["graph"];
            s.graph.family = g.value("family", s.graph.family);
            s.graph.d = g.value("d", s.graph.d);
            s.graph.p = g.value("p", s.graph.p);
        }
        if (j.contains("n_values")) s.n_values = j["n_values"].get<std::vector<int>>();
        if (j.contains("beta_range")) {
            s.beta_min = j["beta_range"][0].get<double>();
            s.beta_max = j["beta_range"][1].get<double>();
        }
        if (j.contains("param_points")) {
            s.param_points.clear();
            for (const auto& pp : j["param_points"])
                s.param_points.push_back({pp[0].get<double>(), pp[1].get<double>()});
        }
        s.m_target = j.value("m", s.m_target);
        s.curve_points = j.value("curve_points", s.curve_points);
        s.replicates = j.value("replicates", s.replicates);
        if (j.contains("sampler")) {
            const auto& sm = j["sampler"];
            s.sampler.burn_in = sm.value("burn_in", s.sampler.burn_in);
            s.sampler.spacing = sm.value("spacing", s.sampler.spacing);
            const std::string init = sm.value("init", std::string("random"));
            if (init == "random")
                s.sampler.init = SpinInit::Random;
            else if (init == "all-plus")
                s.sampler.init = SpinInit::AllPlus;
            else
                throw ConfigError("spec: unknown sampler init: " + init);
        }
        s.seed = j.value("seed", std::uint64_t{0});
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("spec: bad field: ") + e.what());
    }
    if (s.replicates < 1) throw ConfigError("spec: replicates must be >= 1");
    for (int n : s.n_values)
        if (n < 2) throw ConfigError("spec: all n_values must be >= 2");
    return s;
}

const char* kCsvHeader =
    "experiment,n,d_or_family,graph_seed,rep_seed,beta_true,B_true,beta_hat,B_hat,"
    "exists,fail_set,err_l2,err_along,err_cross,t_stat,rate_bound";

namespace {

std::string fmt_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

std::string records_to_csv(const std::vector<ExperimentRecord>& records) {
    std::ostringstream os;
    os << kCsvHeader << '\n';
    for (const auto& r : records) {
        os << r.experiment << ',' << r.n << ',' << r.family << ',' << r.graph_seed << ','
           << r.rep_seed << ',' << fmt_double(r.beta_true) << ',' << fmt_double(r.b_true)
           << ',' << fmt_double(r.beta_hat) << ',' << fmt_double(r.b_hat) << ','
           << (r.exists ? 1 : 0) << ',' << r.fail_set << ',' << fmt_double(r.err_l2)
           << ',' << fmt_double(r.err_along) << ',' << fmt_double(r.err_cross) << ','
           << fmt_double(r.t_stat) << ',' << fmt_double(r.rate_bound) << '\n';
    }
    return os.str();
}

}  // namespace ising
