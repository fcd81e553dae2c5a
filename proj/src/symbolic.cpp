#include "juliadim/symbolic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace juliadim {

void DirectedGraph::validate() const {
    if (vertex_count < 1) throw SchemaError("graph needs at least one vertex");
    if (edges.empty()) throw SchemaError("graph needs at least one edge");
    for (const Edge& e : edges) {
        if (e.from < 0 || e.from >= vertex_count || e.to < 0 ||
            e.to >= vertex_count)
            throw SchemaError("edge '" + e.id + "' references a missing vertex");
    }
}

IncidenceMatrix IncidenceMatrix::from_rows(
    const std::vector<std::vector<int>>& rows) {
    const int n = int(rows.size());
    IncidenceMatrix m(n);
    for (int i = 0; i < n; ++i) {
        if (int(rows[size_t(i)].size()) != n)
            throw Error("incidence matrix must be square");
        for (int j = 0; j < n; ++j) {
            if (rows[size_t(i)][size_t(j)] < 0)
                throw Error("incidence matrix entries must be nonnegative");
            m.at(i, j) = rows[size_t(i)][size_t(j)];
        }
    }
    return m;
}

std::vector<double> IncidenceMatrix::row_sums() const {
    std::vector<double> s(size_t(n_), 0.0);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) s[size_t(i)] += at(i, j);
    return s;
}

namespace {

std::vector<int> reachable(const IncidenceMatrix& a, int start, bool transpose) {
    const int n = a.size();
    std::vector<int> seen(size_t(n), 0);
    std::vector<int> stack{start};
    seen[size_t(start)] = 1;
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (int v = 0; v < n; ++v) {
            const int w = transpose ? a.at(v, u) : a.at(u, v);
            if (w > 0 && !seen[size_t(v)]) {
                seen[size_t(v)] = 1;
                stack.push_back(v);
            }
        }
    }
    return seen;
}

// boolean matrix product with saturation to {0,1}
IncidenceMatrix bool_product(const IncidenceMatrix& a, const IncidenceMatrix& b) {
    const int n = a.size();
    IncidenceMatrix c(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            if (a.at(i, k) == 0) continue;
            for (int j = 0; j < n; ++j)
                if (b.at(k, j) > 0) c.at(i, j) = 1;
        }
    return c;
}

constexpr std::uint64_t kSat = std::numeric_limits<std::uint64_t>::max();

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
    return (a > kSat - b) ? kSat : a + b;
}

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
    if (a == 0 || b == 0) return 0;
    if (a > kSat / b) return kSat;
    return a * b;
}

using CountMatrix = std::vector<std::vector<std::uint64_t>>;

CountMatrix count_product(const CountMatrix& a, const CountMatrix& b) {
    const size_t n = a.size();
    CountMatrix c(n, std::vector<std::uint64_t>(n, 0));
    for (size_t i = 0; i < n; ++i)
        for (size_t k = 0; k < n; ++k) {
            if (a[i][k] == 0) continue;
            for (size_t j = 0; j < n; ++j)
                c[i][j] = sat_add(c[i][j], sat_mul(a[i][k], b[k][j]));
        }
    return c;
}

CountMatrix count_power(const IncidenceMatrix& a, int p) {
    const size_t n = size_t(a.size());
    CountMatrix base(n, std::vector<std::uint64_t>(n, 0));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            base[i][j] = std::uint64_t(a.at(int(i), int(j)));
    CountMatrix result(n, std::vector<std::uint64_t>(n, 0));
    for (size_t i = 0; i < n; ++i) result[i][i] = 1;
    while (p > 0) {
        if (p & 1) result = count_product(result, base);
        base = count_product(base, base);
        p >>= 1;
    }
    return result;
}

} // namespace

bool is_irreducible(const IncidenceMatrix& a) {
    const int n = a.size();
    if (n == 0) return false;
    const auto fwd = reachable(a, 0, false);
    const auto bwd = reachable(a, 0, true);
    for (int v = 0; v < n; ++v)
        if (!fwd[size_t(v)] || !bwd[size_t(v)]) return false;
    return true;
}

bool is_aperiodic(const IncidenceMatrix& a) {
    if (!is_irreducible(a))
        throw NotIrreducible("aperiodicity requires an irreducible matrix");
    // period = gcd over edges u->v of level(u) + 1 - level(v), levels from BFS
    const int n = a.size();
    std::vector<int> level(size_t(n), -1);
    std::vector<int> queue{0};
    level[0] = 0;
    for (size_t q = 0; q < queue.size(); ++q) {
        const int u = queue[q];
        for (int v = 0; v < n; ++v) {
            if (a.at(u, v) > 0 && level[size_t(v)] < 0) {
                level[size_t(v)] = level[size_t(u)] + 1;
                queue.push_back(v);
            }
        }
    }
    int g = 0;
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v)
            if (a.at(u, v) > 0)
                g = std::gcd(g, std::abs(level[size_t(u)] + 1 - level[size_t(v)]));
    return g == 1;
}

bool is_aperiodic_power_test(const IncidenceMatrix& a) {
    if (!is_irreducible(a))
        throw NotIrreducible("aperiodicity requires an irreducible matrix");
    const int n = a.size();
    const int wielandt = (n - 1) * (n - 1) + 1;
    IncidenceMatrix base(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) base.at(i, j) = a.at(i, j) > 0 ? 1 : 0;
    IncidenceMatrix acc(n);
    for (int i = 0; i < n; ++i) acc.at(i, i) = 1;
    int p = wielandt;
    while (p > 0) {
        if (p & 1) acc = bool_product(acc, base);
        base = bool_product(base, base);
        p >>= 1;
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (acc.at(i, j) == 0) return false;
    return true;
}

SpectralData spectral_radius(const IncidenceMatrix& a, double tol, int budget) {
    if (!is_irreducible(a))
        throw NotIrreducible("spectral_radius requires an irreducible matrix");
    const int n = a.size();
    std::vector<double> x(size_t(n), 1.0), y(size_t(n), 0.0);
    double prev = -1.0;
    SpectralData out;
    // iterate with A + I; the shift keeps periodic matrices convergent and
    // only moves the Perron root by exactly one
    for (int it = 0; it < budget; ++it) {
        for (int i = 0; i < n; ++i) {
            double s = x[size_t(i)];
            for (int j = 0; j < n; ++j) s += double(a.at(i, j)) * x[size_t(j)];
            y[size_t(i)] = s;
        }
        double num = 0.0, den = 0.0, norm = 0.0;
        for (int i = 0; i < n; ++i) {
            num += y[size_t(i)] * x[size_t(i)];
            den += x[size_t(i)] * x[size_t(i)];
            norm = std::max(norm, y[size_t(i)]);
        }
        const double rayleigh = num / den - 1.0;
        for (int i = 0; i < n; ++i) x[size_t(i)] = y[size_t(i)] / norm;
        if (it > 0 && std::abs(rayleigh - prev) < tol) {
            out.radius = rayleigh;
            out.eigenvector = x;
            out.iterations = it + 1;
            return out;
        }
        prev = rayleigh;
    }
    throw NonConvergence("spectral_radius: power iteration budget exhausted");
}

double topological_entropy(const IncidenceMatrix& a) {
    return std::log(spectral_radius(a).radius);
}

Subshift::Subshift(const DirectedGraph& graph,
                   const std::vector<int>& maps_per_edge)
    : vertex_count_(graph.vertex_count), inc_(0) {
    graph.validate();
    if (maps_per_edge.size() != graph.edges.size())
        throw Error("maps_per_edge size must match edge count");
    for (const auto& e : graph.edges) {
        edge_from_.push_back(e.from);
        edge_to_.push_back(e.to);
    }
    for (size_t e = 0; e < graph.edges.size(); ++e) {
        if (maps_per_edge[e] < 1)
            throw EmptyFamily("edge '" + graph.edges[e].id +
                              "' carries no maps");
        for (int m = 0; m < maps_per_edge[e]; ++m)
            symbols_.push_back(Symbol{int(e), m});
    }
    const int n = int(symbols_.size());
    inc_ = IncidenceMatrix(n);
    succ_.assign(size_t(n), {});
    for (int s = 0; s < n; ++s)
        for (int t = 0; t < n; ++t)
            if (terminal_vertex(s) == initial_vertex(t)) {
                inc_.at(s, t) = 1;
                succ_[size_t(s)].push_back(t);
            }
}

int Subshift::initial_vertex(int s) const {
    return edge_from_[size_t(symbols_[size_t(s)].edge)];
}

int Subshift::terminal_vertex(int s) const {
    return edge_to_[size_t(symbols_[size_t(s)].edge)];
}

bool Subshift::admissible(const SymbolicWord& w, bool cyclic) const {
    if (w.empty()) return false;
    for (size_t k = 0; k + 1 < w.size(); ++k)
        if (terminal_vertex(w[k]) != initial_vertex(w[k + 1])) return false;
    if (cyclic && terminal_vertex(w.back()) != initial_vertex(w.front()))
        return false;
    return true;
}

std::uint64_t Subshift::count_words(int length, bool cyclic) const {
    if (length < 1) return 0;
    const size_t n = size_t(symbol_count());
    if (cyclic) {
        const CountMatrix p = count_power(inc_, length);
        std::uint64_t t = 0;
        for (size_t i = 0; i < n; ++i) t = sat_add(t, p[i][i]);
        return t;
    }
    const CountMatrix p = count_power(inc_, length - 1);
    std::uint64_t t = 0;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) t = sat_add(t, p[i][j]);
    return t;
}

void Subshift::for_each_word(
    int length, bool cyclic,
    const std::function<void(const SymbolicWord&)>& fn,
    std::uint64_t cap) const {
    if (length < 1) throw Error("word length must be >= 1");
    const std::uint64_t total = count_words(length, cyclic);
    if (total > cap)
        throw CountCapExceeded("admissible word count " + std::to_string(total) +
                                   " exceeds cap " + std::to_string(cap),
                               total);

    const int n = symbol_count();
    const int nv = vertex_count_;

    // closable[j][s*nv + v]: appending exactly j more symbols after s can
    // end at terminal vertex v; used to prune cyclic enumeration
    std::vector<std::vector<char>> closable;
    if (cyclic) {
        closable.assign(size_t(length), std::vector<char>(size_t(n) * nv, 0));
        for (int s = 0; s < n; ++s)
            closable[0][size_t(s) * nv + terminal_vertex(s)] = 1;
        for (int j = 1; j < length; ++j)
            for (int s = 0; s < n; ++s)
                for (int t : successors(s))
                    for (int v = 0; v < nv; ++v)
                        if (closable[size_t(j - 1)][size_t(t) * nv + v])
                            closable[size_t(j)][size_t(s) * nv + v] = 1;
    }

    SymbolicWord w;
    w.reserve(size_t(length));
    std::function<void()> rec = [&]() {
        const int remaining = length - int(w.size());
        if (remaining == 0) {
            fn(w);
            return;
        }
        auto try_symbol = [&](int s) {
            if (cyclic) {
                const int v0 = w.empty() ? initial_vertex(s) : initial_vertex(w[0]);
                if (!closable[size_t(remaining - 1)][size_t(s) * nv + v0]) return;
            }
            w.push_back(s);
            rec();
            w.pop_back();
        };
        if (w.empty())
            for (int s = 0; s < n; ++s) try_symbol(s);
        else
            for (int s : successors(w.back())) try_symbol(s);
    };
    rec();
}

std::vector<SymbolicWord> Subshift::enumerate_words(int length, bool cyclic,
                                                    std::uint64_t cap) const {
    std::vector<SymbolicWord> out;
    for_each_word(length, cyclic, [&](const SymbolicWord& w) { out.push_back(w); },
                  cap);
    return out;
}

} // namespace juliadim
