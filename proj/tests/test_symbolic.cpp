#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>

#include "juliadim/symbolic.hpp"

using namespace juliadim;

namespace {

// vertex-level matrix of the bundled three-vertex example: all edges
// except (1,2)
IncidenceMatrix example_matrix() {
    return IncidenceMatrix::from_rows({{1, 0, 1}, {1, 1, 1}, {1, 1, 1}});
}

struct SplitMix {
    std::uint64_t s;
    std::uint64_t next() {
        s += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = s;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
};

// three-vertex example as a subshift, one map per edge
Subshift example_shift() {
    DirectedGraph g;
    g.vertex_count = 3;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            if (i == 0 && j == 1) continue;
            g.edges.push_back({std::to_string(i) + std::to_string(j), i, j});
        }
    return Subshift(g, std::vector<int>(8, 1));
}

} // namespace

TEST_CASE("irreducibility") {
    CHECK(is_irreducible(example_matrix()));
    CHECK_FALSE(is_irreducible(IncidenceMatrix::from_rows({{0, 1}, {0, 0}})));
    CHECK(is_irreducible(IncidenceMatrix::from_rows({{1}})));
}

TEST_CASE("aperiodicity") {
    CHECK(is_aperiodic(example_matrix()));
    CHECK_FALSE(is_aperiodic(IncidenceMatrix::from_rows({{0, 1}, {1, 0}})));
    CHECK(is_aperiodic(IncidenceMatrix::from_rows({{1, 1}, {1, 0}})));
    CHECK_THROWS_AS(is_aperiodic(IncidenceMatrix::from_rows({{0, 1}, {0, 0}})),
                    NotIrreducible);
}

TEST_CASE("spectral radius closed forms") {
    const double golden = (3.0 + std::sqrt(5.0)) / 2.0;
    CHECK(std::abs(spectral_radius(example_matrix(), 1e-13).radius - golden) <
          1e-10);
    CHECK(spectral_radius(IncidenceMatrix::from_rows({{1}})).radius ==
          doctest::Approx(1.0));
    CHECK(spectral_radius(IncidenceMatrix::from_rows({{1, 1}, {1, 1}})).radius ==
          doctest::Approx(2.0));
    // periodic irreducible matrices still converge (unit shift)
    CHECK(spectral_radius(IncidenceMatrix::from_rows({{0, 1}, {1, 0}})).radius ==
          doctest::Approx(1.0));
}

TEST_CASE("topological entropy") {
    const double golden = (3.0 + std::sqrt(5.0)) / 2.0;
    CHECK(topological_entropy(example_matrix()) ==
          doctest::Approx(std::log(golden)).epsilon(1e-9));
    CHECK(topological_entropy(IncidenceMatrix::from_rows({{1, 1}, {1, 1}})) ==
          doctest::Approx(std::log(2.0)));
    CHECK(topological_entropy(IncidenceMatrix::from_rows({{1}})) ==
          doctest::Approx(0.0));
}

TEST_CASE("word enumeration on the example system") {
    const Subshift shift = example_shift();
    CHECK(shift.symbol_count() == 8);

    // cyclic length 1: the three self-loops
    CHECK(shift.enumerate_words(1, true).size() == 3);

    // cyclic length 2: trace(A^2) with A^2 = [[2,1,2],[3,2,3],[3,2,3]]
    CHECK(shift.count_words(2, true) == 7);
    CHECK(shift.enumerate_words(2, true).size() == 7);

    for (const SymbolicWord& w : shift.enumerate_words(3, true))
        CHECK(shift.admissible(w, true));
}

TEST_CASE("single self-loop has one word per length") {
    DirectedGraph g;
    g.vertex_count = 1;
    g.edges.push_back({"loop", 0, 0});
    const Subshift shift(g, {1});
    for (int n = 1; n <= 6; ++n) {
        CHECK(shift.count_words(n, true) == 1);
        CHECK(shift.enumerate_words(n, true).size() == 1);
        CHECK(shift.enumerate_words(n, false).size() == 1);
    }
}

TEST_CASE("word cap carries the exact count") {
    const Subshift shift = example_shift();
    try {
        shift.enumerate_words(6, false, 10);
        FAIL("expected CountCapExceeded");
    } catch (const CountCapExceeded& e) {
        CHECK(e.count == shift.count_words(6, false));
        CHECK(e.count > 10);
    }
}

TEST_CASE("property: enumeration count matches matrix powers") {
    SplitMix rng{99};
    int done = 0;
    while (done < 30) {
        const int nv = 1 + int(rng.next() % 3);
        DirectedGraph g;
        g.vertex_count = nv;
        for (int i = 0; i < nv; ++i)
            for (int j = 0; j < nv; ++j)
                if (rng.next() % 2)
                    g.edges.push_back({std::to_string(i) + std::to_string(j),
                                       i, j});
        if (g.edges.empty()) continue;
        const Subshift shift(g, std::vector<int>(g.edges.size(), 1));
        for (int n = 1; n <= 8; ++n) {
            for (const bool cyclic : {false, true}) {
                const auto words = shift.enumerate_words(n, cyclic, 2000000);
                CHECK(std::uint64_t(words.size()) ==
                      shift.count_words(n, cyclic));
                for (const auto& w : words) CHECK(shift.admissible(w, cyclic));
            }
        }
        ++done;
    }
}

TEST_CASE("property: aperiodicity criteria agree on random matrices") {
    SplitMix rng{7};
    int done = 0;
    while (done < 1000) {
        const int n = 1 + int(rng.next() % 6);
        IncidenceMatrix a(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) a.at(i, j) = int(rng.next() % 2);
        if (!is_irreducible(a)) continue;
        CHECK(is_aperiodic(a) == is_aperiodic_power_test(a));
        ++done;
    }
}

TEST_CASE("property: row sum bounds on the Perron root") {
    SplitMix rng{21};
    int done = 0;
    while (done < 200) {
        const int n = 1 + int(rng.next() % 5);
        IncidenceMatrix a(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) a.at(i, j) = int(rng.next() % 2);
        if (!is_irreducible(a)) continue;
        const double r = spectral_radius(a).radius;
        const auto sums = a.row_sums();
        const double lo = *std::min_element(sums.begin(), sums.end());
        const double hi = *std::max_element(sums.begin(), sums.end());
        CHECK(r >= lo - 1e-9);
        CHECK(r <= hi + 1e-9);
        ++done;
    }
}
