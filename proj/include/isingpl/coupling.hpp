#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "isingpl/graph.hpp"

namespace ising {

// Sparse symmetric non-negative coupling matrix with zero diagonal.
// Stored once per unordered pair plus a per-row adjacency index so a
// Glauber sweep can update local fields in O(degree).
class CouplingMatrix {
public:
    struct Entry {
        int i, j;   // i < j
        double w;   // >= 0
    };
    struct Neighbor {
        int j;
        double w;
    };

    CouplingMatrix(int n, std::vector<Entry> entries);

    int n() const { return n_; }
    const std::vector<Entry>& entries() const { return entries_; }
    std::span<const Neighbor> neighbors(int i) const {
        return {adj_.data() + adj_start_[i],
                static_cast<std::size_t>(adj_start_[i + 1] - adj_start_[i])};
    }
    const std::vector<double>& row_sums() const { return row_sums_; }
    double gamma() const { return gamma_; }
    double entry(int i, int j) const;  // O(degree) lookup, 0 if absent

    // A(i,j) = n / (2E) on edges of g; throws ConfigError on an empty graph.
    static CouplingMatrix scaled_adjacency(const Graph& g);

private:
    int n_;
    std::vector<Entry> entries_;
    std::vector<Neighbor> adj_;
    std::vector<int> adj_start_;
    std::vector<double> row_sums_;
    double gamma_;
};

enum class Regime { SparseBoundedDegree, DenseIrregular, DenseRegularLike, Indeterminate };

const char* regime_name(Regime r);

struct RegimeThresholds {
    double mean_field = 0.05;    // (1/n) sum A^2 at/above this => sparse
    double row_sum_var = 0.01;   // row-sum variance at/above this => irregular
};

struct RegimeReport {
    double gamma = 0;
    double mean_field_stat = 0;    // (1/n) sum_{i,j} A(i,j)^2
    double row_sum_variance = 0;   // (1/n) sum_i (R_i - Rbar)^2
    double total_weight = 0;       // (1/n) sum_{i,j} A(i,j)
    Regime label = Regime::Indeterminate;
};

RegimeReport regime_report(const CouplingMatrix& A, RegimeThresholds t = {});

std::string regime_report_to_json(const RegimeReport& r);

// Text format: first line "n nnz", then nnz lines "i j w" with i < j and
// w printed with 15 significant digits.
void save_coupling(std::ostream& os, const CouplingMatrix& A);
CouplingMatrix load_coupling(std::istream& is);
void save_coupling_file(const std::string& path, const CouplingMatrix& A);
CouplingMatrix load_coupling_file(const std::string& path);

}  // namespace ising
