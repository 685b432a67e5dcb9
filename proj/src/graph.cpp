#include "isingpl/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "isingpl/errors.hpp"
#include "isingpl/rng.hpp"

namespace ising {

namespace {

std::vector<int> count_degrees(int n, const std::vector<std::pair<int, int>>& edges) {
    std::vector<int> deg(n, 0);
    for (auto [i, j] : edges) {
        ++deg[i];
        ++deg[j];
    }
    return deg;
}

std::uint64_t pair_key(int i, int j) {
    return (static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint32_t>(j);
}

}  // namespace

Graph make_graph(int n, std::vector<std::pair<int, int>> edges) {
    if (n <= 0) throw ConfigError("graph: n must be positive");
    for (auto& [i, j] : edges) {
        if (i == j) throw ConfigError("graph: self-loop at vertex " + std::to_string(i));
        if (i < 0 || j < 0 || i >= n || j >= n)
            throw ConfigError("graph: edge endpoint out of range");
        if (i > j) std::swap(i, j);
    }
    std::sort(edges.begin(), edges.end());
    if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
        throw ConfigError("graph: duplicate edge");
    Graph g;
    g.n = n;
    g.degrees = count_degrees(n, edges);
    g.edges = std::move(edges);
    return g;
}

Graph gen_regular(int n, int d, std::uint64_t seed) {
    if (d <= 0 || d >= n || (static_cast<long long>(n) * d) % 2 != 0)
        throw ConfigError("gen_regular: infeasible degree (need n*d even, 0 < d < n)");
    Rng rng(seed);
    const std::size_t total = static_cast<std::size_t>(n) * d;

    // Configuration model with incremental stub matching: draw random stub
    // pairs, skip self-loops and repeats, restart from scratch on a dead end.
    const int max_attempts = 1000;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        std::vector<int> stubs;
        stubs.reserve(total);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < d; ++k) stubs.push_back(i);
        std::unordered_set<std::uint64_t> seen;
        std::vector<std::pair<int, int>> edges;
        edges.reserve(total / 2);
        bool ok = true;
        while (!stubs.empty()) {
            bool placed = false;
            const std::size_t tries = std::max<std::size_t>(200, stubs.size());
            for (std::size_t t = 0; t < tries; ++t) {
                std::size_t p = rng.below(stubs.size());
                std::size_t q = rng.below(stubs.size());
                if (p == q) continue;
                int i = stubs[p], j = stubs[q];
                if (i == j) continue;
                if (i > j) std::swap(i, j);
                if (!seen.insert(pair_key(i, j)).second) continue;
                edges.emplace_back(i, j);
                if (p < q) std::swap(p, q);  // pop the larger index first
                stubs[p] = stubs.back();
                stubs.pop_back();
                stubs[q] = stubs.back();
                stubs.pop_back();
                placed = true;
                break;
            }
            if (!placed) { ok = false; break; }
        }
        if (ok) {
            Graph g = make_graph(n, std::move(edges));
            g.seed = seed;
            return g;
        }
    }
    throw GenerationFailure("gen_regular: rejection budget exhausted (n=" +
                            std::to_string(n) + ", d=" + std::to_string(d) + ")");
}

Graph gen_er(int n, double p, std::uint64_t seed) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("gen_er: p must be in [0,1]");
    Rng rng(seed);
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rng.uniform() < p) edges.emplace_back(i, j);
    Graph g = make_graph(n, std::move(edges));
    g.seed = seed;
    return g;
}

Graph gen_biregular(int a, int b, int c, int d, std::uint64_t seed) {
    if (a <= 0 || b <= 0 || c <= 0 || d <= 0)
        throw ConfigError("gen_biregular: all parameters must be positive");
    if (static_cast<long long>(a) * c != static_cast<long long>(b) * d || c > b || d > a)
        throw ConfigError("gen_biregular: infeasible (need a*c == b*d, c <= b, d <= a)");
    Rng rng(seed);
    const std::size_t stubs_n = static_cast<std::size_t>(a) * c;

    // Bipartite configuration model, incremental: match random left/right
    // stubs, skip repeated pairs, restart on a dead end.  Right vertices are
    // numbered after the left ones.
    const int max_attempts = 1000;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        std::vector<int> left, right;
        left.reserve(stubs_n);
        right.reserve(stubs_n);
        for (int i = 0; i < a; ++i)
            for (int k = 0; k < c; ++k) left.push_back(i);
        for (int j = 0; j < b; ++j)
            for (int k = 0; k < d; ++k) right.push_back(a + j);
        std::unordered_set<std::uint64_t> seen;
        std::vector<std::pair<int, int>> edges;
        edges.reserve(stubs_n);
        bool ok = true;
        while (!left.empty()) {
            bool placed = false;
            const std::size_t tries = std::max<std::size_t>(200, left.size());
            for (std::size_t t = 0; t < tries; ++t) {
                std::size_t p = rng.below(left.size());
                std::size_t q = rng.below(right.size());
                const int i = left[p], j = right[q];
                if (!seen.insert(pair_key(i, j)).second) continue;
                edges.emplace_back(i, j);
                left[p] = left.back();
                left.pop_back();
                right[q] = right.back();
                right.pop_back();
                placed = true;
                break;
            }
            if (!placed) { ok = false; break; }
        }
        if (ok) {
            Graph g = make_graph(a + b, std::move(edges));
            g.seed = seed;
            return g;
        }
    }
    throw GenerationFailure("gen_biregular: rejection budget exhausted");
}

Graph gen_graphon(int n, const std::vector<std::vector<double>>& grid,
                  std::uint64_t seed) {
    if (grid.empty()) throw ConfigError("gen_graphon: empty grid");
    const std::size_t k = grid.size();
    for (const auto& row : grid) {
        if (row.size() != k) throw ConfigError("gen_graphon: grid must be square");
        for (double v : row)
            if (!(v >= 0.0 && v <= 1.0))
                throw ConfigError("gen_graphon: grid values must lie in [0,1]");
    }
    Rng rng(seed);
    std::vector<double> u(n);
    for (double& v : u) v = rng.uniform();

    auto w_at = [&](double x, double y) {
        if (k == 1) return grid[0][0];
        double gx = x * static_cast<double>(k - 1);
        double gy = y * static_cast<double>(k - 1);
        std::size_t ix = std::min(k - 2, static_cast<std::size_t>(gx));
        std::size_t iy = std::min(k - 2, static_cast<std::size_t>(gy));
        double fx = gx - static_cast<double>(ix);
        double fy = gy - static_cast<double>(iy);
        return grid[ix][iy] * (1 - fx) * (1 - fy) + grid[ix + 1][iy] * fx * (1 - fy) +
               grid[ix][iy + 1] * (1 - fx) * fy + grid[ix + 1][iy + 1] * fx * fy;
    };

    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rng.uniform() < w_at(u[i], u[j])) edges.emplace_back(i, j);
    Graph g = make_graph(n, std::move(edges));
    g.seed = seed;
    return g;
}

Graph complete_graph(int n) {
    std::vector<std::pair<int, int>> edges;
    edges.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
    return make_graph(n, std::move(edges));
}

void save_graph(std::ostream& os, const Graph& g) {
    os << g.n << ' ' << g.edges.size() << '\n';
    for (auto [i, j] : g.edges) os << i << ' ' << j << '\n';
}

Graph load_graph(std::istream& is) {
    std::string line;
    int n = -1;
    long long m = -1;
    std::vector<std::pair<int, int>> edges;
    while (std::getline(is, line)) {
        auto pos = line.find('#');
        if (pos != std::string::npos) line.erase(pos);
        std::istringstream ls(line);
        if (n < 0) {
            if (ls >> n >> m) edges.reserve(static_cast<std::size_t>(m));
            continue;
        }
        int i, j;
        if (ls >> i >> j) edges.emplace_back(i, j);
    }
    if (n < 0) throw ConfigError("load_graph: missing header line");
    if (m >= 0 && static_cast<long long>(edges.size()) != m)
        throw ConfigError("load_graph: edge count mismatch");
    return make_graph(n, std::move(edges));
}

void save_graph_file(const std::string& path, const Graph& g) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open " + path + " for writing");
    save_graph(os, g);
}

Graph load_graph_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open " + path);
    return load_graph(is);
}

}  // namespace ising
