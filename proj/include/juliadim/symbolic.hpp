#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "juliadim/errors.hpp"

namespace juliadim {

struct DirectedGraph {
    struct Edge {
        std::string id;
        int from = 0; // 0-based internally; configs are 1-based
        int to = 0;
    };
    int vertex_count = 0;
    std::vector<Edge> edges;

    void validate() const;
};

/// One letter of the subshift alphabet: a (map, edge) pair, stored as
/// indices into the owning system's edge list and edge family.
struct Symbol {
    int edge = 0;
    int map = 0;
};

/// Square nonnegative integer matrix. For subshift use the entries are 0/1
/// and rows/columns are indexed by alphabet symbols, but the spectral
/// routines accept any nonnegative matrix (e.g. a vertex-level matrix).
class IncidenceMatrix {
public:
    explicit IncidenceMatrix(int n) : n_(n), a_(size_t(n) * n, 0) {}
    static IncidenceMatrix from_rows(const std::vector<std::vector<int>>& rows);

    int size() const { return n_; }
    int at(int i, int j) const { return a_[size_t(i) * n_ + j]; }
    int& at(int i, int j) { return a_[size_t(i) * n_ + j]; }

    std::vector<double> row_sums() const;

private:
    int n_;
    std::vector<int> a_;
};

bool is_irreducible(const IncidenceMatrix& a);

/// gcd-of-cycle-lengths test; requires irreducibility.
bool is_aperiodic(const IncidenceMatrix& a);

/// Wielandt test: some power up to (n-1)^2 + 1 is entrywise positive.
/// Equivalent to the gcd test for irreducible matrices.
bool is_aperiodic_power_test(const IncidenceMatrix& a);

struct SpectralData {
    double radius = 0.0;
    std::vector<double> eigenvector; // positive, sup-norm 1
    int iterations = 0;
};

/// Perron root by power iteration (with a unit shift so periodic irreducible
/// matrices still converge); stops when successive Rayleigh quotients differ
/// by less than tol.
SpectralData spectral_radius(const IncidenceMatrix& a, double tol = 1e-12,
                             int budget = 100000);

double topological_entropy(const IncidenceMatrix& a);

using SymbolicWord = std::vector<int>; // symbol indices, time order

/// Alphabet plus transition structure of the subshift of finite type over
/// (map, edge) pairs.
class Subshift {
public:
    Subshift(const DirectedGraph& graph,
             const std::vector<int>& maps_per_edge);

    int symbol_count() const { return int(symbols_.size()); }
    const std::vector<Symbol>& symbols() const { return symbols_; }
    const Symbol& symbol(int s) const { return symbols_[size_t(s)]; }
    int initial_vertex(int s) const;
    int terminal_vertex(int s) const;
    const IncidenceMatrix& incidence() const { return inc_; }
    const std::vector<int>& successors(int s) const { return succ_[size_t(s)]; }

    bool admissible(const SymbolicWord& w, bool cyclic) const;

    /// Exact admissible word count (saturating at uint64 max): trace(A^N)
    /// for cyclic words, 1^T A^(N-1) 1 otherwise.
    std::uint64_t count_words(int length, bool cyclic) const;

    /// Visits every admissible word of the given length in lexicographic
    /// symbol order. Checks the count cap first.
    void for_each_word(int length, bool cyclic,
                       const std::function<void(const SymbolicWord&)>& fn,
                       std::uint64_t cap = 10'000'000) const;

    std::vector<SymbolicWord> enumerate_words(int length, bool cyclic,
                                              std::uint64_t cap = 10'000'000) const;

private:
    int vertex_count_;
    std::vector<int> edge_from_, edge_to_;
    std::vector<Symbol> symbols_;
    IncidenceMatrix inc_;
    std::vector<std::vector<int>> succ_;
};

} // namespace juliadim
