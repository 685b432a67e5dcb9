#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "isingpl/errors.hpp"
#include "isingpl/graph.hpp"
#include "isingpl/harness.hpp"
#include "isingpl/meanfield.hpp"
#include "isingpl/model.hpp"
#include "isingpl/pseudolikelihood.hpp"
#include "vendor_json.hpp"

namespace {

using namespace ising;

std::string read_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open " + path + " for writing");
    os << text;
}

struct GraphGenArgs {
    std::string type = "regular";
    int n = 100, d = 4;
    double p = 0.5;
    int a = 0, b = 0, c = 0, dd = 0;
    std::string graphon_path;
    std::uint64_t seed = 0;
    std::string out;
    std::string coupling_out;
};

int do_graph_gen(const GraphGenArgs& a) {
    Graph g;
    if (a.type == "regular") {
        g = gen_regular(a.n, a.d, a.seed);
    } else if (a.type == "er") {
        g = gen_er(a.n, a.p, a.seed);
    } else if (a.type == "biregular") {
        g = gen_biregular(a.a, a.b, a.c, a.dd, a.seed);
    } else if (a.type == "graphon") {
        const auto j = nlohmann::json::parse(read_file(a.graphon_path));
        std::vector<std::vector<double>> grid;
        for (const auto& row : j) grid.push_back(row.get<std::vector<double>>());
        g = gen_graphon(a.n, grid, a.seed);
    } else if (a.type == "complete") {
        g = complete_graph(a.n);
    } else {
        throw ConfigError("unknown graph type: " + a.type);
    }
    if (!a.out.empty())
        save_graph_file(a.out, g);
    else
        save_graph(std::cout, g);
    if (!a.coupling_out.empty())
        save_coupling_file(a.coupling_out, CouplingMatrix::scaled_adjacency(g));
    return 0;
}

struct SampleArgs {
    std::string coupling;
    double beta = 1.0, b_field = 0.0;
    int burn_in = 2000, spacing = 50, samples = 1;
    std::string init = "random";
    std::uint64_t seed = 0;
    std::string out;
    std::string spins_out;
    bool dump_spins = false;
};

int do_sample(const SampleArgs& a) {
    const CouplingMatrix A = load_coupling_file(a.coupling);
    const IsingParams p{a.beta, a.b_field};
    SpinInit init;
    if (a.init == "random")
        init = SpinInit::Random;
    else if (a.init == "all-plus")
        init = SpinInit::AllPlus;
    else
        throw ConfigError("unknown init: " + a.init);

    GlauberChain chain(A, p, Rng(a.seed), init);
    chain.run(a.burn_in);

    std::ostringstream csv;
    csv << "replicate,sweep,magnetization,hamiltonian";
    if (a.dump_spins) csv << ",spins";
    csv << '\n';
    SpinConfig last;
    for (int s = 0; s < a.samples; ++s) {
        if (s > 0) chain.run(a.spacing);
        last = chain.state();
        double mag = 0;
        for (int v : last) mag += v;
        mag /= A.n();
        char buf[80];
        std::snprintf(buf, sizeof buf, "%d,%d,%.12g,%.12g", s,
                      a.burn_in + s * a.spacing, mag, hamiltonian(A, p, last));
        csv << buf;
        if (a.dump_spins) csv << ',' << spins_to_string(last);
        csv << '\n';
    }
    if (!a.out.empty())
        write_file(a.out, csv.str());
    else
        std::cout << csv.str();
    if (!a.spins_out.empty()) save_spins_file(a.spins_out, last);
    return 0;
}

struct FitArgs {
    std::string coupling, spins;
    bool have_b_known = false, have_beta_known = false;
    double b_known = 0, beta_known = 0;
};

int do_fit(const FitArgs& a) {
    const CouplingMatrix A = load_coupling_file(a.coupling);
    const SpinConfig x = load_spins_file(a.spins);
    if (a.have_b_known) {
        nlohmann::json j{{"beta_hat", fit_beta(A, x, a.b_known)},
                         {"b_known", a.b_known}};
        std::cout << j.dump(2) << '\n';
        return 0;
    }
    if (a.have_beta_known) {
        nlohmann::json j{{"b_hat", fit_b(A, x, a.beta_known)},
                         {"beta_known", a.beta_known}};
        std::cout << j.dump(2) << '\n';
        return 0;
    }
    std::cout << fit_result_to_json(fit_joint(A, x)) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ising model sampling and pseudo-likelihood parameter estimation"};
    app.require_subcommand(1);

    // graph gen
    auto* graph_cmd = app.add_subcommand("graph", "graph utilities");
    graph_cmd->require_subcommand(1);
    GraphGenArgs ga;
    auto* gen = graph_cmd->add_subcommand("gen", "generate a random graph");
    gen->add_option("--type", ga.type, "regular|er|biregular|graphon|complete");
    gen->add_option("--n", ga.n, "vertex count");
    gen->add_option("--d", ga.d, "regular degree");
    gen->add_option("--p", ga.p, "edge probability");
    gen->add_option("--a", ga.a, "bipartite: left size");
    gen->add_option("--b", ga.b, "bipartite: right size");
    gen->add_option("--c", ga.c, "bipartite: left degree");
    gen->add_option("--dd", ga.dd, "bipartite: right degree");
    gen->add_option("--graphon", ga.graphon_path, "JSON grid for graphon type");
    gen->add_option("--seed", ga.seed, "rng seed");
    gen->add_option("--out", ga.out, "output edge-list file (default stdout)");
    gen->add_option("--coupling-out", ga.coupling_out,
                    "also write the scaled coupling matrix here");

    // sample
    SampleArgs sa;
    auto* sample = app.add_subcommand("sample", "draw Glauber samples");
    sample->add_option("--coupling", sa.coupling)->required();
    sample->add_option("--beta", sa.beta);
    sample->add_option("--B", sa.b_field);
    sample->add_option("--burn-in", sa.burn_in);
    sample->add_option("--spacing", sa.spacing);
    sample->add_option("--samples", sa.samples);
    sample->add_option("--init", sa.init, "random|all-plus");
    sample->add_option("--seed", sa.seed);
    sample->add_option("--out", sa.out, "CSV output (default stdout)");
    sample->add_option("--spins-out", sa.spins_out, "write the last configuration");
    sample->add_flag("--spins", sa.dump_spins, "include full spin rows in the CSV");

    // fit
    FitArgs fa;
    auto* fit = app.add_subcommand("fit", "pseudo-likelihood fit");
    fit->add_option("--coupling", fa.coupling)->required();
    fit->add_option("--spins", fa.spins)->required();
    auto* opt_bk = fit->add_option("--b-known", fa.b_known,
                                   "fit beta only, with B fixed at this value");
    auto* opt_betak = fit->add_option("--beta-known", fa.beta_known,
                                      "fit B only, with beta fixed at this value");

    // diagnose
    std::string diag_coupling;
    auto* diag = app.add_subcommand("diagnose", "coupling-matrix regime report");
    diag->add_option("--coupling", diag_coupling)->required();

    // experiment
    std::string exp_name, exp_spec_path, exp_out;
    std::uint64_t exp_seed = 0;
    bool exp_seed_set = false;
    auto* exp = app.add_subcommand("experiment", "run a canned Monte-Carlo experiment");
    exp->add_option("name", exp_name, "figure2|rates|identifiability|custom")
        ->required();
    exp->add_option("--spec", exp_spec_path, "JSON experiment spec file");
    exp->add_option("--seed", exp_seed, "master seed (overrides spec)")
        ->each([&](const std::string&) { exp_seed_set = true; });
    exp->add_option("--out", exp_out, "CSV output (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 2 : 0;
    }

    try {
        if (gen->parsed()) return do_graph_gen(ga);
        if (sample->parsed()) return do_sample(sa);
        if (fit->parsed()) {
            fa.have_b_known = opt_bk->count() > 0;
            fa.have_beta_known = opt_betak->count() > 0;
            return do_fit(fa);
        }
        if (diag->parsed()) {
            std::cout << regime_report_to_json(regime_report(load_coupling_file(diag_coupling)))
                      << '\n';
            return 0;
        }
        if (exp->parsed()) {
            ExperimentSpec spec = exp_spec_path.empty()
                                      ? default_spec(exp_name)
                                      : spec_from_json(read_file(exp_spec_path));
            spec.name = exp_name;
            if (exp_seed_set) spec.seed = exp_seed;
            const std::string csv = records_to_csv(run_experiment(spec));
            if (!exp_out.empty())
                write_file(exp_out, csv);
            else
                std::cout << csv;
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 3;
    }
    return 2;
}
