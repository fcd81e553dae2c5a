#pragma once

#include <string>
#include <vector>

#include "juliadim/rational_map.hpp"
#include "juliadim/symbolic.hpp"

namespace juliadim {

/// A rational graph-directed Markov system: a directed graph whose edges
/// carry finite families of rational maps, together with the induced
/// subshift over (map, edge) symbols. Immutable after construction.
class GdmsSystem {
public:
    GdmsSystem(DirectedGraph graph,
               std::vector<std::vector<RationalMap>> families);

    const DirectedGraph& graph() const { return graph_; }
    int vertex_count() const { return graph_.vertex_count; }
    const std::vector<std::vector<RationalMap>>& families() const {
        return families_;
    }
    const Subshift& shift() const { return shift_; }
    const IncidenceMatrix& incidence() const { return shift_.incidence(); }
    bool irreducible() const { return irreducible_; }
    bool aperiodic() const { return aperiodic_; }

    int symbol_count() const { return shift_.symbol_count(); }
    const RationalMap& map_of(int symbol) const {
        const Symbol& s = shift_.symbol(symbol);
        return families_[size_t(s.edge)][size_t(s.map)];
    }
    int initial_vertex(int symbol) const { return shift_.initial_vertex(symbol); }
    int terminal_vertex(int symbol) const { return shift_.terminal_vertex(symbol); }

    /// Symbols whose edge starts at v.
    const std::vector<int>& symbols_from(int v) const {
        return from_vertex_[size_t(v)];
    }
    /// Symbols whose edge ends at v.
    const std::vector<int>& symbols_into(int v) const {
        return into_vertex_[size_t(v)];
    }

    /// Distinct generator maps (union of all edge families, deduplicated).
    std::vector<const RationalMap*> distinct_generators() const;

private:
    DirectedGraph graph_;
    std::vector<std::vector<RationalMap>> families_;
    Subshift shift_;
    std::vector<std::vector<int>> from_vertex_, into_vertex_;
    bool irreducible_ = false;
    bool aperiodic_ = false;
};

GdmsSystem load_system(const std::string& json_text);
GdmsSystem load_system_file(const std::string& path);
std::string save_system(const GdmsSystem& sys);

/// The bundled three-vertex example family: vertices {1,2,3}, every edge
/// except (1,2), and maps z^n, (z-3i)^n + 3i, (z-3)^n + 3 attached by
/// terminal vertex. Requires n >= 5.
GdmsSystem example_section3(int n);

/// One-vertex, one-self-loop system with the given maps on the loop.
GdmsSystem single_loop_system(std::vector<RationalMap> maps);

/// Skew-product state: the tracked finite head of the address, the fiber
/// point, the current vertex, and the accumulated spherical derivative
/// along the steps taken so far.
struct SkewPoint {
    SymbolicWord word;
    size_t head = 0; // index of the next symbol to apply
    SpherePoint z;
    int vertex = 0;
    double derivative = 1.0;
    bool critical_hit = false;

    bool exhausted() const { return head >= word.size(); }
    int remaining() const { return int(word.size() - head); }
};

SkewPoint make_skew_point(const GdmsSystem& sys, SymbolicWord word, SpherePoint z);

/// Applies the head map to the fiber point, advances the vertex, drops the
/// head symbol and multiplies the derivative accumulator.
SkewPoint skew_step(const GdmsSystem& sys, SkewPoint p);

/// The composed map of a finite admissible word. Holds an explicitly
/// composed rational map when the degree stays within the cap, otherwise
/// evaluates pointwise by sequential application.
class WordMap {
public:
    WordMap(const GdmsSystem& sys, SymbolicWord word, int degree_cap = 4096);

    const SymbolicWord& word() const { return word_; }
    int length() const { return int(word_.size()); }
    int from_vertex() const { return from_; }
    int to_vertex() const { return to_; }
    bool is_explicit() const { return explicit_.has_value(); }
    const RationalMap& explicit_map() const { return *explicit_; }
    std::uint64_t degree() const { return degree_; } // saturating product

    SpherePoint operator()(const SpherePoint& z) const;
    double spherical_derivative(const SpherePoint& z) const; // chain rule
    /// Plane-chart complex derivative along the orbit; throws
    /// DerivativeSingular if the orbit leaves the finite chart.
    Complex complex_derivative(Complex z) const;
    SpherePoint eval_sequential(const SpherePoint& z) const;

private:
    const GdmsSystem* sys_;
    SymbolicWord word_;
    std::optional<RationalMap> explicit_;
    std::uint64_t degree_;
    int from_, to_;
};

WordMap word_map(const GdmsSystem& sys, SymbolicWord w, int degree_cap = 4096);

/// All word maps with the given initial and terminal vertices and length
/// at most max_len, in (length, lexicographic) order.
std::vector<WordMap> enumerate_h_class(const GdmsSystem& sys, int from, int to,
                                       int max_len,
                                       std::uint64_t cap = 10'000'000,
                                       int degree_cap = 4096);

} // namespace juliadim
