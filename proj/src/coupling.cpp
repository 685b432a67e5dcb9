#include "isingpl/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "isingpl/errors.hpp"
#include "vendor_json.hpp"

namespace ising {

CouplingMatrix::CouplingMatrix(int n, std::vector<Entry> entries) : n_(n) {
    if (n <= 0) throw ConfigError("coupling: n must be positive");
    for (auto& e : entries) {
        if (e.i == e.j) throw ConfigError("coupling: diagonal entry must be zero");
        if (e.i < 0 || e.j < 0 || e.i >= n || e.j >= n)
            throw ConfigError("coupling: index out of range");
        if (!(e.w >= 0)) throw ConfigError("coupling: negative or NaN weight");
        if (e.i > e.j) std::swap(e.i, e.j);
    }
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) {
                  return std::tie(a.i, a.j) < std::tie(b.i, b.j);
              });
    for (std::size_t k = 1; k < entries.size(); ++k)
        if (entries[k].i == entries[k - 1].i && entries[k].j == entries[k - 1].j)
            throw ConfigError("coupling: duplicate entry");
    entries_ = std::move(entries);

    std::vector<int> deg(n, 0);
    for (const auto& e : entries_) {
        ++deg[e.i];
        ++deg[e.j];
    }
    adj_start_.assign(n + 1, 0);
    for (int i = 0; i < n; ++i) adj_start_[i + 1] = adj_start_[i] + deg[i];
    adj_.resize(adj_start_[n]);
    std::vector<int> fill(adj_start_.begin(), adj_start_.end() - 1);
    for (const auto& e : entries_) {
        adj_[fill[e.i]++] = {e.j, e.w};
        adj_[fill[e.j]++] = {e.i, e.w};
    }
    row_sums_.assign(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (const auto& nb : neighbors(i)) row_sums_[i] += nb.w;
    gamma_ = 0.0;
    for (double r : row_sums_) gamma_ = std::max(gamma_, r);
}

double CouplingMatrix::entry(int i, int j) const {
    if (i < 0 || j < 0 || i >= n_ || j >= n_) throw ConfigError("coupling: index out of range");
    if (i == j) return 0.0;
    for (const auto& nb : neighbors(i))
        if (nb.j == j) return nb.w;
    return 0.0;
}

CouplingMatrix CouplingMatrix::scaled_adjacency(const Graph& g) {
    if (g.edges.empty()) throw ConfigError("scaled_adjacency: graph has no edges");
    const double w = static_cast<double>(g.n) / (2.0 * g.edge_count());
    std::vector<Entry> entries;
    entries.reserve(g.edges.size());
    for (auto [i, j] : g.edges) entries.push_back({i, j, w});
    return CouplingMatrix(g.n, std::move(entries));
}

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::SparseBoundedDegree: return "SparseBoundedDegree";
        case Regime::DenseIrregular: return "DenseIrregular";
        case Regime::DenseRegularLike: return "DenseRegularLike";
        default: return "Indeterminate";
    }
}

RegimeReport regime_report(const CouplingMatrix& A, RegimeThresholds t) {
    RegimeReport rep;
    const int n = A.n();
    rep.gamma = A.gamma();
    double sum_sq = 0;
    for (const auto& e : A.entries()) sum_sq += 2.0 * e.w * e.w;
    rep.mean_field_stat = sum_sq / n;
    double total = 0;
    for (double r : A.row_sums()) total += r;
    rep.total_weight = total / n;
    const double rbar = total / n;
    double var = 0;
    for (double r : A.row_sums()) var += (r - rbar) * (r - rbar);
    rep.row_sum_variance = var / n;

    if (!std::isfinite(rep.mean_field_stat) || !std::isfinite(rep.row_sum_variance) ||
        rep.total_weight <= 0) {
        rep.label = Regime::Indeterminate;
    } else if (rep.mean_field_stat >= t.mean_field) {
        rep.label = Regime::SparseBoundedDegree;
    } else if (rep.row_sum_variance >= t.row_sum_var) {
        rep.label = Regime::DenseIrregular;
    } else {
        rep.label = Regime::DenseRegularLike;
    }
    return rep;
}

std::string regime_report_to_json(const RegimeReport& r) {
    nlohmann::json j{{"gamma", r.gamma},
                     {"mean_field_stat", r.mean_field_stat},
                     {"row_sum_variance", r.row_sum_variance},
                     {"total_weight", r.total_weight},
                     {"label", regime_name(r.label)}};
    return j.dump(2);
}

void save_coupling(std::ostream& os, const CouplingMatrix& A) {
    os << A.n() << ' ' << A.entries().size() << '\n';
    char buf[64];
    for (const auto& e : A.entries()) {
        std::snprintf(buf, sizeof buf, "%d %d %.15g", e.i, e.j, e.w);
        os << buf << '\n';
    }
}

CouplingMatrix load_coupling(std::istream& is) {
    std::string line;
    int n = -1;
    long long nnz = -1;
    std::vector<CouplingMatrix::Entry> entries;
    while (std::getline(is, line)) {
        auto pos = line.find('#');
        if (pos != std::string::npos) line.erase(pos);
        std::istringstream ls(line);
        if (n < 0) {
            if (ls >> n >> nnz) entries.reserve(static_cast<std::size_t>(nnz));
            continue;
        }
        int i, j;
        double w;
        if (ls >> i >> j >> w) entries.push_back({i, j, w});
    }
    if (n < 0) throw ConfigError("load_coupling: missing header line");
    if (nnz >= 0 && static_cast<long long>(entries.size()) != nnz)
        throw ConfigError("load_coupling: entry count mismatch");
    return CouplingMatrix(n, std::move(entries));
}

void save_coupling_file(const std::string& path, const CouplingMatrix& A) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open " + path + " for writing");
    save_coupling(os, A);
}

CouplingMatrix load_coupling_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open " + path);
    return load_coupling(is);
}

}  // namespace ising
