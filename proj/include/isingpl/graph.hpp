#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace ising {

// Simple undirected graph on vertices 0..n-1.  Edges are stored once per
// unordered pair, sorted, with no self-loops or duplicates.
struct Graph {
    int n = 0;
    std::vector<std::pair<int, int>> edges;  // (i, j) with i < j, sorted
    std::vector<int> degrees;                // derived from edges
    std::uint64_t seed = 0;                  // seed used to generate (0 if explicit)

    int edge_count() const { return static_cast<int>(edges.size()); }
};

// Validates, canonicalizes (i < j, sorted) and fills degrees.
Graph make_graph(int n, std::vector<std::pair<int, int>> edges);

// Random d-regular graph via the configuration model with rejection of
// self-loops and multi-edges (up to 1000 attempts).
Graph gen_regular(int n, int d, std::uint64_t seed);

// Erdos-Renyi G(n, p).
Graph gen_er(int n, double p, std::uint64_t seed);

// Bipartite graph with a left vertices of degree c and b right vertices of
// degree d; requires a*c == b*d.
Graph gen_biregular(int a, int b, int c, int d, std::uint64_t seed);

// W-random graph from a k x k grid of values in [0,1] with bilinear
// interpolation; latent positions are i.i.d. uniform.
Graph gen_graphon(int n, const std::vector<std::vector<double>>& grid,
                  std::uint64_t seed);

Graph complete_graph(int n);

// Text format: first line "n m", then m lines "i j" (i < j, sorted);
// '#' starts a comment line.
void save_graph(std::ostream& os, const Graph& g);
Graph load_graph(std::istream& is);
void save_graph_file(const std::string& path, const Graph& g);
Graph load_graph_file(const std::string& path);

}  // namespace ising
