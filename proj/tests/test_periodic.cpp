#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "juliadim/periodic.hpp"

using namespace juliadim;

namespace {

GdmsSystem power_system(int d) {
    return single_loop_system({RationalMap::power(d)});
}

JuliaCloud small_circle_cloud(const GdmsSystem& sys, int n = 10000) {
    InverseIterationOptions opts;
    opts.samples_per_vertex = n;
    return inverse_iteration(sys, {{SpherePoint(1.0, 0.0)}}, opts);
}

} // namespace

TEST_CASE("z^2: the unique repelling fixed point is z = 1") {
    const RepellingSet set = find_repelling(power_system(2), 1);
    REQUIRE(set.points.size() == 1);
    CHECK(chordal(set.points[0].z, SpherePoint(1.0, 0.0)) < 1e-10);
    CHECK(set.points[0].multiplier == doctest::Approx(2.0));
    CHECK(set.points[0].residual < 1e-9);
    CHECK(set.words_incomplete == 0);
}

TEST_CASE("z^2 period 2: the three cube roots of unity with multiplier 4") {
    const RepellingSet set = find_repelling(power_system(2), 2);
    REQUIRE(set.points.size() == 3);
    for (const RepellingPoint& p : set.points) {
        CHECK(std::abs(std::abs(p.z.value()) - 1.0) < 1e-10);
        Complex cube = p.z.value() * p.z.value() * p.z.value();
        CHECK(std::abs(cube - Complex(1.0)) < 1e-9);
        CHECK(p.multiplier == doctest::Approx(4.0));
    }
}

TEST_CASE("z^d period counts: d^p - 1 repelling points") {
    for (int d : {2, 3}) {
        const GdmsSystem sys = power_system(d);
        const int pmax = d == 2 ? 6 : 5;
        for (int p = 1; p <= pmax; ++p) {
            const RepellingSet set = find_repelling(sys, p);
            CHECK(int(set.points.size()) ==
                  int(std::pow(double(d), double(p))) - 1);
            const double want = std::pow(double(d), double(p));
            for (const RepellingPoint& pt : set.points)
                CHECK(std::abs(pt.multiplier - want) / want < 1e-6);
        }
    }
}

TEST_CASE("re-verification: skew steps return and reproduce the multiplier") {
    const GdmsSystem sys = example_section3(5);
    FindRepellingOptions opts;
    const RepellingSet set = find_repelling(sys, 2, opts);
    REQUIRE(set.points.size() > 100);
    for (const RepellingPoint& pt : set.points) {
        SkewPoint sp = make_skew_point(sys, pt.word, pt.z);
        while (!sp.exhausted()) sp = skew_step(sys, sp);
        CHECK(chordal(sp.z, pt.z) < 1e-8);
        CHECK(std::abs(sp.derivative - pt.multiplier) / pt.multiplier < 1e-6);
    }

    // independent finite-difference check of a few multipliers
    int fd_done = 0;
    for (size_t k = 0; k < set.points.size() && fd_done < 8; k += 17) {
        const RepellingPoint& pt = set.points[k];
        const WordMap w(sys, pt.word);
        const double h = 1e-7;
        const SpherePoint a(pt.z.value() + h), b(pt.z.value() - h);
        const double fd = chordal(w(a), w(b)) / chordal(a, b);
        CHECK(std::abs(fd - pt.multiplier) / pt.multiplier < 1e-4);
        ++fd_done;
    }
}

TEST_CASE("multipliers are invariant under cyclic word rotation") {
    const GdmsSystem sys = example_section3(5);
    const RepellingSet set = find_repelling(sys, 2);
    // group point multisets by word; rotations must carry identical
    // multiplier multisets
    for (const RepellingPoint& pt : set.points) {
        SymbolicWord rot{pt.word[1], pt.word[0]};
        // the shifted point g_{w1}(z) is periodic for the rotated word with
        // the same multiplier
        const SpherePoint shifted = sys.map_of(pt.word[0])(pt.z);
        const WordMap wrot(sys, rot);
        CHECK(chordal(wrot(shifted), shifted) < 1e-6);
        const double m = wrot.spherical_derivative(shifted);
        CHECK(std::abs(m - pt.multiplier) / pt.multiplier < 1e-6);
    }
}

TEST_CASE("newton refinement") {
    const GdmsSystem sys = power_system(2);
    const SymbolicWord w{0};

    const SpherePoint r = refine_newton(sys, w, SpherePoint(0.9, 0.1), 1e-12);
    CHECK(chordal(r, SpherePoint(1.0, 0.0)) < 1e-12);

    // an exact fixed point comes back unchanged
    const SpherePoint fixed = refine_newton(sys, w, SpherePoint(1.0, 0.0), 1e-12);
    CHECK(fixed.value() == Complex(1.0, 0.0));

    // F' = 2z - 1 vanishes at 0.5
    CHECK_THROWS_AS(refine_newton(sys, w, SpherePoint(0.5, 0.0), 1e-12),
                    DerivativeSingular);
}

TEST_CASE("example system period 1: repelling points on every self-loop") {
    const GdmsSystem sys = example_section3(5);
    const RepellingSet set = find_repelling(sys, 1);
    // each of the three self-loops carries exactly 4 repelling fixed points
    REQUIRE(set.points.size() == 12);
    std::vector<int> per_vertex(3, 0);
    for (const RepellingPoint& pt : set.points) {
        ++per_vertex[size_t(sys.initial_vertex(pt.word.front()))];
        CHECK(pt.multiplier == doctest::Approx(5.0));
    }
    for (int v = 0; v < 3; ++v) CHECK(per_vertex[size_t(v)] == 4);

    // and each lies within 0.02 of the vertex cloud
    const auto seeds = repelling_seeds(sys);
    InverseIterationOptions copts;
    copts.samples_per_vertex = 30000;
    copts.threads = 2;
    const JuliaCloud cloud = inverse_iteration(sys, seeds, copts);
    for (const RepellingPoint& pt : set.points) {
        const int v = sys.initial_vertex(pt.word.front());
        double best = 2.0;
        for (const CloudSample& s : cloud.vertices[size_t(v)])
            best = std::min(best, chordal(s.z, pt.z));
        CHECK(best < 0.02);
    }
}

TEST_CASE("example system: full fixed-point accounting up to period 3") {
    const GdmsSystem sys = example_section3(5);
    const auto seeds = repelling_seeds(sys);
    InverseIterationOptions copts;
    copts.samples_per_vertex = 30000;
    copts.threads = 2;
    const JuliaCloud cloud = inverse_iteration(sys, seeds, copts);

    FindRepellingOptions opts;
    opts.seed_cloud = &cloud;
    opts.threads = 2;
    // trace(A^p) words, deg 5^p finite fixed points each, plus infinity;
    // pure words lose one superattracting finite point
    const int words_expected[3] = {3, 7, 18};
    for (int p = 1; p <= 3; ++p) {
        const RepellingSet set = find_repelling(sys, p, opts);
        CHECK(set.words_processed == words_expected[size_t(p - 1)]);
        CHECK(set.words_failed == 0);
        CHECK(set.words_incomplete == 0);
        // every word map here is a polynomial of degree 5^p: the finite
        // repelling count per word is 5^p minus the attracting ones; pure
        // words have exactly one superattracting finite fixed point
        const int deg = int(std::pow(5.0, p));
        CHECK(int(set.points.size()) >= words_expected[size_t(p - 1)] * (deg - 1));
        CHECK(int(set.points.size()) <= words_expected[size_t(p - 1)] * deg);
    }
}

TEST_CASE("density gap: roots of unity fill the circle") {
    const GdmsSystem sys = power_system(2);
    const JuliaCloud cloud = small_circle_cloud(sys);

    std::vector<RepellingPoint> pts;
    for (int p = 1; p <= 8; ++p) {
        const RepellingSet set = find_repelling(sys, p);
        pts.insert(pts.end(), set.points.begin(), set.points.end());
    }
    CHECK(density_gap(sys, pts, cloud) < 0.05);

    // the cloud samples themselves have gap zero
    std::vector<RepellingPoint> self;
    for (const CloudSample& s : cloud.vertices[0])
        self.push_back(RepellingPoint{{0}, s.z, 2.0, 0.0});
    CHECK(density_gap(sys, self, cloud) == 0.0);
}

TEST_CASE("density gap decreases with period on the example system") {
    const GdmsSystem sys = example_section3(5);
    const auto seeds = repelling_seeds(sys);
    InverseIterationOptions copts;
    copts.samples_per_vertex = 20000;
    copts.threads = 2;
    const JuliaCloud cloud = inverse_iteration(sys, seeds, copts);

    FindRepellingOptions opts;
    opts.seed_cloud = &cloud;
    opts.threads = 2;
    std::vector<RepellingPoint> pts;
    std::vector<double> gaps;
    for (int p = 1; p <= 3; ++p) {
        const RepellingSet set = find_repelling(sys, p, opts);
        pts.insert(pts.end(), set.points.begin(), set.points.end());
        gaps.push_back(density_gap(sys, pts, cloud));
    }
    CHECK(gaps[1] <= gaps[0] + 1e-12);
    CHECK(gaps[2] <= gaps[1] + 1e-12);
}
